#include "dynspeckle/descriptors.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstring>
#include <numbers>
#include <vector>

#include "dynspeckle/error.hpp"
#include "dynspeckle/parallel.hpp"

namespace dynspeckle {
namespace {

constexpr std::size_t kLevels = 256;
using PairTable = std::vector<double>;  // indexed [a * 256 + b]

// Sliding-window reduction over a frame stream. Frames arrive in blocks; the
// last `lookback` frames of each block are carried to the front of the
// buffer so every kernel call sees frames [t - history, t] contiguously.
// Each pixel accumulates in ascending frame order regardless of threading.
//
// kernel(buffer, t, history, p0, p1, acc, degenerate) adds the contribution
// of frame t (buffer-relative index) for pixels [p0, p1).
template <class Kernel>
std::uint64_t stream_reduce(FrameSource& source, std::size_t lookback, const EngineOptions& options,
                            std::vector<double>& acc, const Kernel& kernel) {
  const std::size_t pixels = source.pixel_count();
  const std::size_t frames = source.frame_count();
  const std::size_t width = source.width();
  const std::size_t height = source.height();
  acc.assign(pixels, 0.0);

  const std::size_t block =
      std::clamp<std::size_t>(options.block_bytes / std::max<std::size_t>(pixels, 1), 1, frames);
  std::vector<std::uint8_t> buffer((lookback + block) * pixels);
  const unsigned threads = resolve_thread_count(options.threads);

  std::atomic<std::uint64_t> degenerate{0};
  std::size_t carry = 0;
  std::size_t consumed = 0;
  source.rewind();
  while (consumed < frames) {
    const std::size_t n = std::min(block, frames - consumed);
    source.read_frames(std::span<std::uint8_t>(buffer.data() + carry * pixels, n * pixels));

    parallel_for(0, height, threads, [&](std::size_t row0, std::size_t row1) {
      const std::size_t p0 = row0 * width;
      const std::size_t p1 = row1 * width;
      std::uint64_t local = 0;
      for (std::size_t t = carry; t < carry + n; ++t) {
        const std::size_t global = consumed + (t - carry);
        const std::size_t history = std::min(lookback, global);
        kernel(buffer.data(), t, history, pixels, p0, p1, acc.data(), local);
      }
      degenerate.fetch_add(local, std::memory_order_relaxed);
    });

    consumed += n;
    const std::size_t next_carry = std::min(lookback, consumed);
    if (next_carry > 0) {
      std::memmove(buffer.data(), buffer.data() + (carry + n - next_carry) * pixels,
                   next_carry * pixels);
    }
    carry = next_carry;
  }
  return degenerate.load();
}

void require_frames(const FrameSource& source, Algorithm algorithm) {
  if (source.frame_count() < min_frames(algorithm)) {
    throw InsufficientFramesError(min_frames(algorithm), source.frame_count());
  }
}

void require_phi(double phi_degrees) {
  if (!std::isfinite(phi_degrees) || phi_degrees < 0.0 || phi_degrees > 180.0) {
    throw InvalidArgumentError("must lie in [0, 180] degrees", "phi_degrees");
  }
}

// a^2 + b^2 + 2ab cos, the quantity under the kernel's square root.
inline double quadratic_form(double a, double b, double cosine) {
  return a * a + b * b + 2.0 * a * b * cosine;
}

PairTable quadratic_table(double cosine) {
  PairTable table(kLevels * kLevels);
  for (std::size_t a = 0; a < kLevels; ++a) {
    for (std::size_t b = 0; b < kLevels; ++b) {
      table[a * kLevels + b] =
          quadratic_form(static_cast<double>(a), static_cast<double>(b), cosine);
    }
  }
  return table;
}

ActivityMap make_map(const FrameSource& source, std::vector<double> values,
                     DescriptorParams params, std::uint64_t degenerate) {
  ActivityMap map;
  map.image = RealImage(source.width(), source.height(), std::move(values));
  map.params = params;
  map.label = source.label();
  map.degenerate_terms = degenerate;
  return map;
}

}  // namespace

std::string_view to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kAvd: return "avd";
    case Algorithm::kFujii: return "fujii";
    case Algorithm::kTau: return "tau";
    case Algorithm::kGd: return "gd";
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "avd") return Algorithm::kAvd;
  if (lower == "fujii") return Algorithm::kFujii;
  if (lower == "tau") return Algorithm::kTau;
  if (lower == "gd") return Algorithm::kGd;
  throw InvalidArgumentError("unknown algorithm '" + std::string(name) + "'", "algo");
}

std::uint32_t min_frames(Algorithm algorithm) { return algorithm == Algorithm::kTau ? 3 : 2; }

void DescriptorParams::validate() const {
  switch (algorithm) {
    case Algorithm::kAvd:
    case Algorithm::kFujii:
    case Algorithm::kTau:
    case Algorithm::kGd: break;
    default: throw InvalidArgumentError("unknown algorithm", "algo");
  }
  if (algorithm != Algorithm::kGd) require_phi(phi_degrees);
  if (max_lag && *max_lag == 0) throw InvalidArgumentError("must be positive", "max_lag");
}

KernelCosines KernelCosines::from_degrees(double phi_degrees) {
  if (phi_degrees == 0.0) return {1.0, -1.0};
  if (phi_degrees == 90.0) return {0.0, 0.0};
  if (phi_degrees == 180.0) return {-1.0, 1.0};
  const double radians = phi_degrees * (std::numbers::pi / 180.0);
  return {std::cos(radians), std::cos(std::numbers::pi - radians)};
}

double generalized_sum(double a, double b, double phi_degrees) {
  const KernelCosines c = KernelCosines::from_degrees(phi_degrees);
  return std::sqrt(std::abs(quadratic_form(a, b, c.cos_pi_minus_phi)));
}

ActivityMap avd_map(FrameSource& source, double phi_degrees, const EngineOptions& options) {
  require_phi(phi_degrees);
  require_frames(source, Algorithm::kAvd);
  const KernelCosines c = KernelCosines::from_degrees(phi_degrees);
  PairTable kernel = quadratic_table(c.cos_pi_minus_phi);
  for (double& v : kernel) v = std::sqrt(std::abs(v));

  std::vector<double> acc;
  stream_reduce(source, 1, options, acc,
                [&kernel](const std::uint8_t* buf, std::size_t t, std::size_t history,
                          std::size_t pixels, std::size_t p0, std::size_t p1, double* out,
                          std::uint64_t&) {
                  if (history < 1) return;
                  const std::uint8_t* prev = buf + (t - 1) * pixels;
                  const std::uint8_t* cur = buf + t * pixels;
                  for (std::size_t p = p0; p < p1; ++p) {
                    out[p] += kernel[std::size_t{prev[p]} * kLevels + cur[p]];
                  }
                });
  const double pairs = static_cast<double>(source.frame_count() - 1);
  for (double& v : acc) v /= pairs;
  return make_map(source, std::move(acc), {Algorithm::kAvd, phi_degrees, std::nullopt}, 0);
}

ActivityMap fujii_map(FrameSource& source, double phi_degrees, const EngineOptions& options) {
  require_phi(phi_degrees);
  require_frames(source, Algorithm::kFujii);
  const KernelCosines c = KernelCosines::from_degrees(phi_degrees);
  const PairTable num = quadratic_table(c.cos_pi_minus_phi);
  const PairTable den = quadratic_table(c.cos_phi);
  PairTable term(kLevels * kLevels);
  std::vector<std::uint8_t> degenerate(kLevels * kLevels, 0);
  for (std::size_t i = 0; i < term.size(); ++i) {
    if (den[i] == 0.0) {
      term[i] = 0.0;
      degenerate[i] = num[i] != 0.0 ? 1 : 0;
    } else {
      term[i] = std::sqrt(std::abs(num[i]) / std::abs(den[i]));
    }
  }

  std::vector<double> acc;
  const std::uint64_t skipped = stream_reduce(
      source, 1, options, acc,
      [&](const std::uint8_t* buf, std::size_t t, std::size_t history, std::size_t pixels,
          std::size_t p0, std::size_t p1, double* out, std::uint64_t& local) {
        if (history < 1) return;
        const std::uint8_t* prev = buf + (t - 1) * pixels;
        const std::uint8_t* cur = buf + t * pixels;
        for (std::size_t p = p0; p < p1; ++p) {
          const std::size_t idx = std::size_t{prev[p]} * kLevels + cur[p];
          out[p] += term[idx];
          local += degenerate[idx];
        }
      });
  return make_map(source, std::move(acc), {Algorithm::kFujii, phi_degrees, std::nullopt}, skipped);
}

ActivityMap tau_map(FrameSource& source, double phi_degrees, const EngineOptions& options) {
  require_phi(phi_degrees);
  require_frames(source, Algorithm::kTau);
  const KernelCosines c = KernelCosines::from_degrees(phi_degrees);
  const PairTable s = quadratic_table(c.cos_pi_minus_phi);
  const PairTable tt = quadratic_table(c.cos_phi);

  std::vector<double> acc;
  const std::uint64_t skipped = stream_reduce(
      source, 2, options, acc,
      [&](const std::uint8_t* buf, std::size_t t, std::size_t history, std::size_t pixels,
          std::size_t p0, std::size_t p1, double* out, std::uint64_t& local) {
        if (history < 2) return;
        const std::uint8_t* fa = buf + (t - 2) * pixels;
        const std::uint8_t* fb = buf + (t - 1) * pixels;
        const std::uint8_t* fc = buf + t * pixels;
        for (std::size_t p = p0; p < p1; ++p) {
          const std::size_t ab = std::size_t{fa[p]} * kLevels + fb[p];
          const std::size_t ac = std::size_t{fa[p]} * kLevels + fc[p];
          const std::size_t bc = std::size_t{fb[p]} * kLevels + fc[p];
          const double numerator = s[ab] * s[ac] * tt[bc];
          const double denominator = s[bc] * tt[ab] * tt[ac];
          if (denominator == 0.0) {
            if (numerator != 0.0) ++local;
            continue;
          }
          out[p] += std::sqrt(std::abs(numerator) / std::abs(denominator));
        }
      });
  return make_map(source, std::move(acc), {Algorithm::kTau, phi_degrees, std::nullopt}, skipped);
}

ActivityMap gd_map(FrameSource& source, std::optional<std::uint32_t> max_lag,
                   const EngineOptions& options) {
  require_frames(source, Algorithm::kGd);
  if (max_lag && *max_lag == 0) throw InvalidArgumentError("must be positive", "max_lag");
  const std::uint32_t frames = source.frame_count();
  if (!max_lag && frames > kGdUnboundedFrameLimit) {
    throw InvalidArgumentError("required for stacks longer than " +
                                   std::to_string(kGdUnboundedFrameLimit) + " frames",
                               "max_lag");
  }
  const std::size_t lag = std::min<std::size_t>(max_lag.value_or(frames - 1), frames - 1);

  std::vector<double> acc;
  stream_reduce(source, lag, options, acc,
                [](const std::uint8_t* buf, std::size_t t, std::size_t history, std::size_t pixels,
                   std::size_t p0, std::size_t p1, double* out, std::uint64_t&) {
                  const std::uint8_t* cur = buf + t * pixels;
                  for (std::size_t j = 1; j <= history; ++j) {
                    const std::uint8_t* earlier = buf + (t - j) * pixels;
                    for (std::size_t p = p0; p < p1; ++p) {
                      out[p] += std::abs(int{cur[p]} - int{earlier[p]});
                    }
                  }
                });
  return make_map(source, std::move(acc), {Algorithm::kGd, 0.0, max_lag}, 0);
}

ActivityMap compute_descriptor(FrameSource& source, const DescriptorParams& params,
                               const EngineOptions& options) {
  params.validate();
  ActivityMap map;
  switch (params.algorithm) {
    case Algorithm::kAvd: map = avd_map(source, params.phi_degrees, options); break;
    case Algorithm::kFujii: map = fujii_map(source, params.phi_degrees, options); break;
    case Algorithm::kTau: map = tau_map(source, params.phi_degrees, options); break;
    case Algorithm::kGd: map = gd_map(source, params.max_lag, options); break;
    default: throw InvalidArgumentError("unknown algorithm", "algo");
  }
  map.params = params;
  return map;
}

ActivityMap avd_map(const FrameStack& stack, double phi_degrees, const EngineOptions& options) {
  StackFrameSource source(stack);
  return avd_map(source, phi_degrees, options);
}

ActivityMap fujii_map(const FrameStack& stack, double phi_degrees, const EngineOptions& options) {
  StackFrameSource source(stack);
  return fujii_map(source, phi_degrees, options);
}

ActivityMap tau_map(const FrameStack& stack, double phi_degrees, const EngineOptions& options) {
  StackFrameSource source(stack);
  return tau_map(source, phi_degrees, options);
}

ActivityMap gd_map(const FrameStack& stack, std::optional<std::uint32_t> max_lag,
                   const EngineOptions& options) {
  StackFrameSource source(stack);
  return gd_map(source, max_lag, options);
}

ActivityMap compute_descriptor(const FrameStack& stack, const DescriptorParams& params,
                               const EngineOptions& options) {
  StackFrameSource source(stack);
  return compute_descriptor(source, params, options);
}

}  // namespace dynspeckle
