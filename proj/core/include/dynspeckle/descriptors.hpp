#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "dynspeckle/frame_stack.hpp"
#include "dynspeckle/image.hpp"

namespace dynspeckle {

enum class Algorithm { kAvd, kFujii, kTau, kGd };

std::string_view to_string(Algorithm algorithm);
/// Accepts "avd", "fujii", "tau", "gd" (case-insensitive).
Algorithm parse_algorithm(std::string_view name);

/// Minimum stack length an algorithm needs: 2 for pairwise, 3 for tau.
std::uint32_t min_frames(Algorithm algorithm);

/// Above this frame count GD requires an explicit max_lag.
inline constexpr std::uint32_t kGdUnboundedFrameLimit = 256;

struct DescriptorParams {
  Algorithm algorithm = Algorithm::kAvd;
  /// Tuning angle in degrees, [0, 180]. Ignored by GD.
  double phi_degrees = 0.0;
  /// GD only: restrict pairs to frame distance <= max_lag.
  std::optional<std::uint32_t> max_lag;

  void validate() const;
};

/// Per-pixel descriptor output plus where it came from.
struct ActivityMap {
  RealImage image;
  DescriptorParams params;
  std::string label;
  /// Terms skipped because their denominator vanished while the numerator
  /// did not (Fujii and tau only).
  std::uint64_t degenerate_terms = 0;

  std::uint32_t width() const noexcept { return image.width; }
  std::uint32_t height() const noexcept { return image.height; }
  double at(std::uint32_t x, std::uint32_t y) const { return image.at(x, y); }
};

struct EngineOptions {
  unsigned threads = 0;  // 0 = hardware concurrency
  /// Upper bound on bytes of frame data buffered per block (the sliding
  /// window carry is extra).
  std::size_t block_bytes = 8u << 20;
};

/// cos(phi) and cos(pi - phi) for a tuning angle in degrees. 0, 90 and 180
/// map to exact values so the degenerate cases of the kernels are exact.
struct KernelCosines {
  double cos_phi;
  double cos_pi_minus_phi;

  static KernelCosines from_degrees(double phi_degrees);
};

/// sqrt(|a^2 + b^2 + 2ab cos(pi - phi)|). phi = 0 gives |a - b|, phi = 180
/// gives a + b.
double generalized_sum(double a, double b, double phi_degrees);

/// Mean of generalized_sum over the N-1 consecutive frame pairs.
ActivityMap avd_map(const FrameStack& stack, double phi_degrees, const EngineOptions& options = {});
ActivityMap avd_map(FrameSource& source, double phi_degrees, const EngineOptions& options = {});

/// Sum over consecutive pairs of sqrt(|S| / |T|) where S uses cos(pi - phi)
/// and T uses cos(phi). A term with T = 0 contributes 0 and, when S != 0,
/// counts as degenerate.
ActivityMap fujii_map(const FrameStack& stack, double phi_degrees,
                      const EngineOptions& options = {});
ActivityMap fujii_map(FrameSource& source, double phi_degrees, const EngineOptions& options = {});

/// Sum over sliding triples (a, b, c) of
///   sqrt(| [S(a,b) S(a,c) / S(b,c)] / [T(a,b) T(a,c) / T(b,c)] |),
/// evaluated as sqrt(|S(a,b) S(a,c) T(b,c)| / |S(b,c) T(a,b) T(a,c)|). A
/// vanishing denominator contributes 0 and counts as degenerate unless the
/// numerator vanishes as well.
ActivityMap tau_map(const FrameStack& stack, double phi_degrees, const EngineOptions& options = {});
ActivityMap tau_map(FrameSource& source, double phi_degrees, const EngineOptions& options = {});

/// Sum of |I^k - I^l| over frame pairs k < l with l - k <= max_lag
/// (unbounded when max_lag is empty, which requires N <= 256).
ActivityMap gd_map(const FrameStack& stack, std::optional<std::uint32_t> max_lag = {},
                   const EngineOptions& options = {});
ActivityMap gd_map(FrameSource& source, std::optional<std::uint32_t> max_lag = {},
                   const EngineOptions& options = {});

/// Dispatches on params.algorithm and records provenance.
ActivityMap compute_descriptor(const FrameStack& stack, const DescriptorParams& params,
                               const EngineOptions& options = {});
ActivityMap compute_descriptor(FrameSource& source, const DescriptorParams& params,
                               const EngineOptions& options = {});

}  // namespace dynspeckle
