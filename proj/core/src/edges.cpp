#include "dynspeckle/edges.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dynspeckle/error.hpp"

namespace dynspeckle {
namespace {

// Half-sample symmetric reflection, periodic with period 2n.
std::size_t reflect(long i, long n) {
  const long period = 2 * n;
  i %= period;
  if (i < 0) i += period;
  return static_cast<std::size_t>(i < n ? i : period - 1 - i);
}

std::vector<double> gaussian_kernel(double sigma) {
  const long radius = static_cast<long>(std::ceil(3.0 * sigma));
  std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (long i = -radius; i <= radius; ++i) {
    const double v = std::exp(-0.5 * static_cast<double>(i * i) / (sigma * sigma));
    k[static_cast<std::size_t>(i + radius)] = v;
    sum += v;
  }
  for (double& v : k) v /= sum;
  return k;
}

}  // namespace

void EdgeParams::validate() const {
  if (!(std::isfinite(sigma) && sigma > 0.0)) throw InvalidArgumentError("must be positive", "sigma");
  if (!(high_threshold > 0.0 && high_threshold <= 1.0)) {
    throw InvalidArgumentError("must lie in (0, 1]", "threshold");
  }
  if (!(low_ratio > 0.0 && low_ratio < 1.0)) {
    throw InvalidArgumentError("must lie in (0, 1)", "low_ratio");
  }
}

RealImage gaussian_blur(const RealImage& image, double sigma) {
  if (!(std::isfinite(sigma) && sigma > 0.0)) throw InvalidArgumentError("must be positive", "sigma");
  const std::vector<double> k = gaussian_kernel(sigma);
  const long radius = static_cast<long>(k.size() / 2);
  const long w = image.width;
  const long h = image.height;

  RealImage horizontal(image.width, image.height);
  for (long y = 0; y < h; ++y) {
    const double* row = image.values.data() + y * w;
    double* out = horizontal.values.data() + y * w;
    for (long x = 0; x < w; ++x) {
      double acc = 0.0;
      for (long i = -radius; i <= radius; ++i) {
        acc += k[static_cast<std::size_t>(i + radius)] * row[reflect(x + i, w)];
      }
      out[x] = acc;
    }
  }

  RealImage out(image.width, image.height);
  for (long y = 0; y < h; ++y) {
    for (long x = 0; x < w; ++x) {
      double acc = 0.0;
      for (long i = -radius; i <= radius; ++i) {
        acc += k[static_cast<std::size_t>(i + radius)] *
               horizontal.values[reflect(y + i, h) * static_cast<std::size_t>(w) +
                                 static_cast<std::size_t>(x)];
      }
      out.values[static_cast<std::size_t>(y * w + x)] = acc;
    }
  }
  return out;
}

RealImage to_luminance(const RgbImage& image) {
  RealImage out(image.width, image.height);
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    out.values[i] = 0.299 * image.pixels[3 * i] + 0.587 * image.pixels[3 * i + 1] +
                    0.114 * image.pixels[3 * i + 2];
  }
  return out;
}

RealImage to_real(const GrayImage& image) {
  RealImage out(image.width, image.height);
  std::copy(image.pixels.begin(), image.pixels.end(), out.values.begin());
  return out;
}

CannyStages canny_stages(const RealImage& image, const EdgeParams& params) {
  params.validate();
  if (image.width == 0 || image.height == 0) throw InvalidArgumentError("image is empty", "image");

  CannyStages s;
  s.smoothed = gaussian_blur(image, params.sigma);
  const long w = image.width;
  const long h = image.height;
  auto px = [&](long x, long y) {
    return s.smoothed.values[reflect(y, h) * static_cast<std::size_t>(w) + reflect(x, w)];
  };

  s.magnitude = RealImage(image.width, image.height);
  std::vector<std::uint8_t> direction(s.magnitude.size());
  double max_magnitude = 0.0;
  for (long y = 0; y < h; ++y) {
    for (long x = 0; x < w; ++x) {
      const double gx = (px(x + 1, y - 1) + 2.0 * px(x + 1, y) + px(x + 1, y + 1)) -
                        (px(x - 1, y - 1) + 2.0 * px(x - 1, y) + px(x - 1, y + 1));
      const double gy = (px(x - 1, y + 1) + 2.0 * px(x, y + 1) + px(x + 1, y + 1)) -
                        (px(x - 1, y - 1) + 2.0 * px(x, y - 1) + px(x + 1, y - 1));
      const std::size_t i = static_cast<std::size_t>(y * w + x);
      const double m = std::hypot(gx, gy);
      s.magnitude.values[i] = m;
      max_magnitude = std::max(max_magnitude, m);
      double angle = std::atan2(gy, gx) * 180.0 / std::numbers::pi;
      if (angle < 0.0) angle += 180.0;
      if (angle < 22.5 || angle >= 157.5) {
        direction[i] = 0;
      } else if (angle < 67.5) {
        direction[i] = 1;
      } else if (angle < 112.5) {
        direction[i] = 2;
      } else {
        direction[i] = 3;
      }
    }
  }

  // Non-maximum suppression along the quantized gradient direction. Ties
  // keep the pixel on the positive side so a plateau of two equal maxima
  // yields a single-pixel ridge.
  constexpr long kStep[4][2] = {{1, 0}, {1, 1}, {0, 1}, {-1, 1}};
  s.suppressed = RealImage(image.width, image.height);
  auto mag = [&](long x, long y) -> double {
    if (x < 0 || y < 0 || x >= w || y >= h) return 0.0;
    return s.magnitude.values[static_cast<std::size_t>(y * w + x)];
  };
  for (long y = 0; y < h; ++y) {
    for (long x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y * w + x);
      const double m = s.magnitude.values[i];
      if (m == 0.0) continue;
      const long dx = kStep[direction[i]][0];
      const long dy = kStep[direction[i]][1];
      if (m >= mag(x - dx, y - dy) && m > mag(x + dx, y + dy)) s.suppressed.values[i] = m;
    }
  }

  s.high = params.high_threshold * max_magnitude;
  s.low = params.low_ratio * s.high;
  s.strong = GrayImage(image.width, image.height);
  s.edges = GrayImage(image.width, image.height);
  if (max_magnitude == 0.0) return s;

  std::vector<std::size_t> stack;
  for (std::size_t i = 0; i < s.suppressed.size(); ++i) {
    if (s.suppressed.values[i] > 0.0 && s.suppressed.values[i] >= s.high) {
      s.strong.pixels[i] = 1;
      s.edges.pixels[i] = 1;
      stack.push_back(i);
    }
  }
  while (!stack.empty()) {
    const std::size_t i = stack.back();
    stack.pop_back();
    const long x = static_cast<long>(i % static_cast<std::size_t>(w));
    const long y = static_cast<long>(i / static_cast<std::size_t>(w));
    for (long ny = y - 1; ny <= y + 1; ++ny) {
      for (long nx = x - 1; nx <= x + 1; ++nx) {
        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
        const std::size_t j = static_cast<std::size_t>(ny * w + nx);
        if (s.edges.pixels[j] == 0 && s.suppressed.values[j] > 0.0 &&
            s.suppressed.values[j] >= s.low) {
          s.edges.pixels[j] = 1;
          stack.push_back(j);
        }
      }
    }
  }
  return s;
}

GrayImage canny_edges(const RealImage& image, const EdgeParams& params) {
  return canny_stages(image, params).edges;
}

GrayImage edge_map_to_display(const GrayImage& edges) {
  GrayImage out = edges;
  for (auto& p : out.pixels) p = p ? 255 : 0;
  return out;
}

}  // namespace dynspeckle
