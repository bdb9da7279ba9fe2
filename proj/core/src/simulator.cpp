#include "dynspeckle/simulator.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <string>

#include "dynspeckle/error.hpp"
#include "dynspeckle/parallel.hpp"
#include "dynspeckle/stack_io.hpp"

namespace dynspeckle {
namespace {

// SplitMix64 finalizer, used as a stateless counter-based generator.
std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Uniform on (0, 1].
double unit_open_closed(std::uint64_t bits) {
  return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

// Unit circular-Gaussian sample (E|z|^2 = 1) for (seed, frame, pixel).
std::complex<double> circular_gaussian(std::uint64_t seed_key, std::uint32_t frame,
                                       std::uint64_t pixel) {
  const std::uint64_t h = mix64(seed_key ^ mix64((std::uint64_t{frame} << 32) ^ pixel));
  const double u1 = unit_open_closed(mix64(h));
  const double u2 = unit_open_closed(mix64(h ^ 0x5851f42d4c957f2dull));
  const double r = std::sqrt(-std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(theta), r * std::sin(theta)};
}

std::size_t wrap(long i, long n) {
  i %= n;
  if (i < 0) i += n;
  return static_cast<std::size_t>(i);
}

double distance_to_segment(double px, double py, double ax, double ay, double bx, double by) {
  const double vx = bx - ax;
  const double vy = by - ay;
  const double len2 = vx * vx + vy * vy;
  double t = len2 > 0.0 ? ((px - ax) * vx + (py - ay) * vy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(px - (ax + t * vx), py - (ay + t * vy));
}

}  // namespace

ActivityField ActivityField::uniform(std::uint32_t width, std::uint32_t height, double rho) {
  ActivityField f{width, height, std::vector<double>(std::size_t{width} * height, rho)};
  f.validate();
  return f;
}

ActivityField ActivityField::from_image(const RealImage& image) {
  ActivityField f{image.width, image.height, image.values};
  f.validate();
  return f;
}

RealImage ActivityField::to_image() const { return RealImage(width, height, rho); }

void ActivityField::validate() const {
  if (width == 0 || height == 0) throw InvalidArgumentError("dimensions must be positive", "size");
  if (rho.size() != std::size_t{width} * height) {
    throw DimensionMismatchError("activity field size does not match its dimensions");
  }
  for (double r : rho) {
    if (!(r >= 0.0 && r <= 1.0)) throw InvalidArgumentError("values must lie in [0, 1]", "rho");
  }
}

void SimulationParams::validate() const {
  if (frames < 2) throw InvalidArgumentError("at least 2 frames are required", "frames");
  if (!(std::isfinite(grain_size) && grain_size >= 1.0)) {
    throw InvalidArgumentError("must be >= 1 pixel", "grain_size");
  }
  if (!(mean_intensity > 0.0 && mean_intensity < 255.0)) {
    throw InvalidArgumentError("must lie in (0, 255)", "mean_intensity");
  }
}

GlyphShape parse_glyph(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "disk") return GlyphShape::kDisk;
  if (lower == "rect") return GlyphShape::kRect;
  if (lower == "strokes") return GlyphShape::kStrokes;
  throw InvalidArgumentError("unknown glyph '" + std::string(name) + "' (disk, rect, strokes)",
                             "glyph");
}

ActivityField make_glyph_field(GlyphShape shape, std::uint32_t width, std::uint32_t height,
                               double rho_inside, double rho_outside) {
  ActivityField f = ActivityField::uniform(width, height, rho_outside);
  const double w = width;
  const double h = height;
  const double cx = (w - 1.0) / 2.0;
  const double cy = (h - 1.0) / 2.0;
  const double s = std::min(w, h);
  for (std::uint32_t y = 0; y < height; ++y) {
    for (std::uint32_t x = 0; x < width; ++x) {
      const double px = x;
      const double py = y;
      bool inside = false;
      switch (shape) {
        case GlyphShape::kDisk:
          inside = std::hypot(px - cx, py - cy) <= 0.3 * s;
          break;
        case GlyphShape::kRect:
          inside = px >= 0.25 * w && px < 0.75 * w && py >= 0.35 * h && py < 0.65 * h;
          break;
        case GlyphShape::kStrokes: {
          // Two crossing diagonals and an underline, like a hand-drawn mark.
          const double half = std::max(1.0, s / 16.0) / 2.0;
          inside = distance_to_segment(px, py, 0.2 * w, 0.2 * h, 0.8 * w, 0.7 * h) <= half ||
                   distance_to_segment(px, py, 0.8 * w, 0.2 * h, 0.2 * w, 0.7 * h) <= half ||
                   distance_to_segment(px, py, 0.2 * w, 0.82 * h, 0.8 * w, 0.82 * h) <= half;
          break;
        }
      }
      if (inside) f.rho[std::size_t{y} * width + x] = rho_inside;
    }
  }
  f.validate();
  return f;
}

SpeckleSimulator::SpeckleSimulator(ActivityField field, SimulationParams params, unsigned threads)
    : field_(std::move(field)), params_(params), threads_(resolve_thread_count(threads)) {
  field_.validate();
  params_.validate();
  const std::size_t pixels = std::size_t{field_.width} * field_.height;
  state_.resize(pixels);
  scratch_.resize(pixels);
  intensity_.resize(pixels);

  const double sigma = params_.grain_size / 2.0;
  const long radius = static_cast<long>(std::ceil(3.0 * sigma));
  kernel_.resize(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (long i = -radius; i <= radius; ++i) {
    const double v = std::exp(-0.5 * static_cast<double>(i * i) / (sigma * sigma));
    kernel_[static_cast<std::size_t>(i + radius)] = v;
    sum += v;
  }
  double sum_sq = 0.0;
  for (double& v : kernel_) {
    v /= sum;
    sum_sq += v * v;
  }
  // E|E|^2 = (sum g^2)^2 for the separable kernel and unit-variance U.
  scale_ = params_.mean_intensity / (sum_sq * sum_sq);
}

void SpeckleSimulator::next_intensity(std::span<double> out) {
  const std::size_t pixels = state_.size();
  if (out.size() != pixels) throw DimensionMismatchError("output span does not match field size");
  const long w = field_.width;
  const long h = field_.height;
  const long radius = static_cast<long>(kernel_.size() / 2);
  const std::uint64_t seed_key = mix64(params_.seed);
  const std::uint32_t k = frame_;

  parallel_for(0, static_cast<std::size_t>(h), threads_, [&](std::size_t r0, std::size_t r1) {
    for (std::size_t y = r0; y < r1; ++y) {
      for (long x = 0; x < w; ++x) {
        const std::size_t p = y * static_cast<std::size_t>(w) + static_cast<std::size_t>(x);
        const std::complex<double> eta = circular_gaussian(seed_key, k, p);
        if (k == 0) {
          state_[p] = eta;
        } else {
          const double rho = field_.rho[p];
          state_[p] = rho * state_[p] + std::sqrt(1.0 - rho * rho) * eta;
        }
      }
      for (long x = 0; x < w; ++x) {
        std::complex<double> acc = 0.0;
        for (long i = -radius; i <= radius; ++i) {
          acc += kernel_[static_cast<std::size_t>(i + radius)] *
                 state_[y * static_cast<std::size_t>(w) + wrap(x + i, w)];
        }
        scratch_[y * static_cast<std::size_t>(w) + static_cast<std::size_t>(x)] = acc;
      }
    }
  });
  parallel_for(0, static_cast<std::size_t>(h), threads_, [&](std::size_t r0, std::size_t r1) {
    for (std::size_t y = r0; y < r1; ++y) {
      for (long x = 0; x < w; ++x) {
        std::complex<double> acc = 0.0;
        for (long i = -radius; i <= radius; ++i) {
          acc += kernel_[static_cast<std::size_t>(i + radius)] *
                 scratch_[wrap(static_cast<long>(y) + i, h) * static_cast<std::size_t>(w) +
                          static_cast<std::size_t>(x)];
        }
        out[y * static_cast<std::size_t>(w) + static_cast<std::size_t>(x)] = scale_ * std::norm(acc);
      }
    }
  });
  ++frame_;
}

void SpeckleSimulator::next_frame(std::span<std::uint8_t> out) {
  if (out.size() != intensity_.size()) {
    throw DimensionMismatchError("output span does not match field size");
  }
  next_intensity(intensity_);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<std::uint8_t>(std::min(255.0, std::floor(intensity_[i] + 0.5)));
  }
}

SimulatedStack generate_stack(const ActivityField& field, const SimulationParams& params,
                              unsigned threads) {
  SpeckleSimulator sim(field, params, threads);
  const std::size_t pixels = std::size_t{field.width} * field.height;
  std::vector<std::uint8_t> data(pixels * params.frames);
  for (std::uint32_t k = 0; k < params.frames; ++k) {
    sim.next_frame(std::span<std::uint8_t>(data.data() + k * pixels, pixels));
  }
  StackMetadata meta;
  meta.label = "simulated-seed" + std::to_string(params.seed);
  return {FrameStack(field.width, field.height, params.frames, std::move(data), std::move(meta)),
          field};
}

void generate_stack_to_file(const ActivityField& field, const SimulationParams& params,
                            const std::filesystem::path& path, unsigned threads) {
  SpeckleSimulator sim(field, params, threads);
  SpkWriter writer(path, field.width, field.height, params.frames);
  std::vector<std::uint8_t> frame(std::size_t{field.width} * field.height);
  for (std::uint32_t k = 0; k < params.frames; ++k) {
    sim.next_frame(frame);
    writer.write_frame(frame);
  }
  writer.commit();
}

double separation_score(const RealImage& map, const ActivityField& truth, double threshold_rho) {
  if (map.width != truth.width || map.height != truth.height ||
      map.values.size() != truth.rho.size()) {
    throw DimensionMismatchError("map and activity field dimensions differ");
  }
  const std::size_t n = map.values.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return map.values[a] < map.values[b]; });

  double active_rank_sum = 0.0;
  std::size_t active = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && map.values[order[j]] == map.values[order[i]]) ++j;
    const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t t = i; t < j; ++t) {
      if (truth.rho[order[t]] < threshold_rho) {
        active_rank_sum += midrank;
        ++active;
      }
    }
    i = j;
  }
  const std::size_t inactive = n - active;
  if (active == 0 || inactive == 0) {
    throw InvalidArgumentError("threshold leaves an empty class", "threshold_rho");
  }
  const double a = static_cast<double>(active);
  const double u = active_rank_sum - a * (a + 1.0) / 2.0;
  return u / (a * static_cast<double>(inactive));
}

}  // namespace dynspeckle
