#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "dynspeckle/frame_stack.hpp"
#include "dynspeckle/image.hpp"

namespace dynspeckle {

/// Ground-truth activity: per-pixel AR(1) temporal correlation of the
/// underlying complex field. 1 is static, 0 decorrelates every frame.
struct ActivityField {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<double> rho;

  static ActivityField uniform(std::uint32_t width, std::uint32_t height, double rho);
  static ActivityField from_image(const RealImage& image);
  RealImage to_image() const;

  double at(std::uint32_t x, std::uint32_t y) const { return rho[std::size_t{y} * width + x]; }
  void validate() const;
};

struct SimulationParams {
  std::uint32_t frames = 200;
  /// Speckle correlation length in pixels; the complex field is smoothed
  /// with a normalized Gaussian of std grain_size / 2.
  double grain_size = 1.0;
  std::uint64_t seed = 1;
  double mean_intensity = 80.0;

  void validate() const;
};

enum class GlyphShape { kDisk, kRect, kStrokes };

GlyphShape parse_glyph(std::string_view name);

/// Hidden-drawing fixture: `rho_inside` on the glyph, `rho_outside`
/// elsewhere. Shapes scale with the field size.
ActivityField make_glyph_field(GlyphShape shape, std::uint32_t width, std::uint32_t height,
                               double rho_inside, double rho_outside);

/// Frame-by-frame generator. Each pixel's complex amplitude follows
///   U_k = rho U_{k-1} + sqrt(1 - rho^2) eta_k,  U_0 = eta_0
/// with eta unit circular-Gaussian noise drawn from a counter-based stream
/// keyed by (seed, frame, pixel). The observed field is U convolved with the
/// grain Gaussian; intensity is |E|^2 scaled so its expectation equals
/// mean_intensity.
class SpeckleSimulator {
 public:
  SpeckleSimulator(ActivityField field, SimulationParams params, unsigned threads = 1);

  std::uint32_t width() const noexcept { return field_.width; }
  std::uint32_t height() const noexcept { return field_.height; }
  std::uint32_t frames_emitted() const noexcept { return frame_; }
  const ActivityField& field() const noexcept { return field_; }

  /// Advances one frame and writes pre-quantization intensities.
  void next_intensity(std::span<double> out);
  /// Advances one frame and writes 8-bit intensities (round half-up,
  /// saturating at 255).
  void next_frame(std::span<std::uint8_t> out);

 private:
  ActivityField field_;
  SimulationParams params_;
  unsigned threads_;
  std::uint32_t frame_ = 0;
  std::vector<std::complex<double>> state_;
  std::vector<std::complex<double>> scratch_;
  std::vector<double> intensity_;
  std::vector<double> kernel_;
  double scale_ = 1.0;
};

struct SimulatedStack {
  FrameStack stack;
  ActivityField truth;
};

SimulatedStack generate_stack(const ActivityField& field, const SimulationParams& params,
                              unsigned threads = 1);

/// Streams the simulated stack straight to an SPK1 file.
void generate_stack_to_file(const ActivityField& field, const SimulationParams& params,
                            const std::filesystem::path& path, unsigned threads = 1);

/// Area under the ROC curve of `map` as a score for "active" pixels
/// (truth rho < threshold_rho), via the Mann-Whitney rank statistic with
/// midranks for ties.
double separation_score(const RealImage& map, const ActivityField& truth, double threshold_rho);

}  // namespace dynspeckle
