#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dynspeckle/image.hpp"

namespace dynspeckle {

/// How a real-valued map is brought onto [0, 1] before display.
struct Normalization {
  enum class Mode { kMinMax, kFixed };

  Mode mode = Mode::kMinMax;
  double lo = 0.0;
  double hi = 1.0;

  static Normalization min_max() { return {}; }
  static Normalization fixed(double lo, double hi);
  /// "minmax" or "fixed:<lo>:<hi>".
  static Normalization parse(std::string_view text);
  std::string to_string() const;

  void validate() const;
};

struct DisplayParams {
  double alpha = 1.0;
  Normalization normalization;

  void validate() const;
};

struct ChannelBinding {
  std::reference_wrapper<const RealImage> map;
  DisplayParams display;
};

struct CompositeSpec {
  ChannelBinding red;
  ChannelBinding green;
  ChannelBinding blue;
};

/// 256-entry colour lookup table indexed by the quantized gray level.
struct PseudocolorLut {
  std::vector<std::array<std::uint8_t, 3>> entries;

  static PseudocolorLut identity_gray();
  void validate() const;
};

/// CSV with 256 lines "index,r,g,b", indices 0..255 each exactly once.
PseudocolorLut parse_lut_csv(std::string_view text);
PseudocolorLut load_lut_csv(const std::filesystem::path& path);

RealImage normalize_map(const RealImage& map, const Normalization& normalization);
RealImage apply_exponent(const RealImage& unit_map, double alpha);
GrayImage quantize_u8(const RealImage& unit_map);
std::uint8_t quantize_u8(double unit_value);

/// normalize -> exponent -> quantize.
GrayImage render_gray(const RealImage& map, const DisplayParams& display);

RgbImage compose_rgb(const CompositeSpec& spec);
RgbImage apply_pseudocolor(const RealImage& unit_map, const PseudocolorLut& lut);

/// 10 log10(255^2 / MSE); +infinity for identical images.
double psnr(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);
double psnr(const GrayImage& a, const GrayImage& b);
double psnr(const RgbImage& a, const RgbImage& b);

}  // namespace dynspeckle
