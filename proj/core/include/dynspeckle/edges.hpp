#pragma once

#include <cstdint>
#include <vector>

#include "dynspeckle/image.hpp"

namespace dynspeckle {

struct EdgeParams {
  double sigma = 1.4;
  /// Fraction of the maximum gradient magnitude, (0, 1].
  double high_threshold = 0.7;
  /// Low hysteresis threshold as a fraction of the high one, (0, 1).
  double low_ratio = 0.4;

  void validate() const;
};

/// Intermediate products of canny_edges, exposed for inspection and tests.
struct CannyStages {
  RealImage smoothed;
  RealImage magnitude;   // Sobel gradient magnitude
  RealImage suppressed;  // magnitude after non-maximum suppression
  double high = 0.0;     // absolute thresholds actually applied
  double low = 0.0;
  GrayImage strong;      // 0/1 seeds: suppressed >= high
  GrayImage edges;       // 0/1 final edge map
};

/// Separable Gaussian, radius ceil(3 sigma), kernel normalized to sum 1,
/// half-sample symmetric borders (... c b a | a b c ...).
RealImage gaussian_blur(const RealImage& image, double sigma);

/// 0.299 R + 0.587 G + 0.114 B.
RealImage to_luminance(const RgbImage& image);
RealImage to_real(const GrayImage& image);

CannyStages canny_stages(const RealImage& image, const EdgeParams& params);
/// Blur, Sobel, 4-direction non-maximum suppression, hysteresis with
/// 8-connected growth. Output pixels are 0 or 1.
GrayImage canny_edges(const RealImage& image, const EdgeParams& params);

/// Maps a 0/1 edge map to {0, 255} for writing.
GrayImage edge_map_to_display(const GrayImage& edges);

}  // namespace dynspeckle
