#pragma once

#include <span>
#include <string>
#include <string_view>

#include "dynspeckle/descriptors.hpp"

namespace dynspeckle {

/// Laser line a stack was recorded under.
enum class Illumination { kBlue, kGreen, kRed, kInfrared };

std::string_view to_string(Illumination illumination);
Illumination parse_illumination(std::string_view name);
/// 473, 532, 632.8 and 780 nm.
double wavelength_nm(Illumination illumination);

struct PresetChannel {
  Illumination illumination;
  Algorithm algorithm;
  double phi_degrees;
  double alpha;
};

/// Published RGB channel bindings for the papyrus composites.
struct CompositePreset {
  std::string_view name;
  std::string_view description;
  PresetChannel red;
  PresetChannel green;
  PresetChannel blue;

  const PresetChannel& channel(char c) const;
};

std::span<const CompositePreset> composite_presets();
/// Throws InvalidArgumentError (field "preset") for unknown names.
const CompositePreset& find_preset(std::string_view name);

/// Every tuning angle used across the presets and the single-channel
/// renderings: 0, 5, 50, 70, 75, 80, 110.
std::span<const double> published_angles();

}  // namespace dynspeckle
