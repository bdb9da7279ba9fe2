#include "dynspeckle/presets.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "dynspeckle/error.hpp"

namespace dynspeckle {
namespace {

using enum Algorithm;
using enum Illumination;

// Captions give alpha only for fig6a/fig6b; the others display at alpha 1.
constexpr std::array kPresets = {
    CompositePreset{"fig4a", "R AVD(5) red laser, G AVD(5) green laser, B tau(80) blue laser",
                    {kRed, kAvd, 5.0, 1.0},
                    {kGreen, kAvd, 5.0, 1.0},
                    {kBlue, kTau, 80.0, 1.0}},
    CompositePreset{"fig5a", "infrared: R AVD(0), G Fujii(110), B tau(70)",
                    {kInfrared, kAvd, 0.0, 1.0},
                    {kInfrared, kFujii, 110.0, 1.0},
                    {kInfrared, kTau, 70.0, 1.0}},
    CompositePreset{"fig6a", "R AVD(0) infrared, G AVD(110) red, B AVD(70) blue, alpha 1",
                    {kInfrared, kAvd, 0.0, 1.0},
                    {kRed, kAvd, 110.0, 1.0},
                    {kBlue, kAvd, 70.0, 1.0}},
    CompositePreset{"fig6b", "infrared: R AVD(5), G Fujii(50), B tau(75), alpha 2",
                    {kInfrared, kAvd, 5.0, 2.0},
                    {kInfrared, kFujii, 50.0, 2.0},
                    {kInfrared, kTau, 75.0, 2.0}},
};

constexpr std::array kPublishedAngles = {0.0, 5.0, 50.0, 70.0, 75.0, 80.0, 110.0};

}  // namespace

std::string_view to_string(Illumination illumination) {
  switch (illumination) {
    case kBlue: return "blue";
    case kGreen: return "green";
    case kRed: return "red";
    case kInfrared: return "infrared";
  }
  return "unknown";
}

Illumination parse_illumination(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (Illumination i : {kBlue, kGreen, kRed, kInfrared}) {
    if (lower == to_string(i)) return i;
  }
  throw InvalidArgumentError("unknown illumination '" + std::string(name) + "'", "illumination");
}

double wavelength_nm(Illumination illumination) {
  switch (illumination) {
    case kBlue: return 473.0;
    case kGreen: return 532.0;
    case kRed: return 632.8;
    case kInfrared: return 780.0;
  }
  return 0.0;
}

const PresetChannel& CompositePreset::channel(char c) const {
  switch (c) {
    case 'r': return red;
    case 'g': return green;
    case 'b': return blue;
    default: throw InvalidArgumentError("channel must be r, g or b", "channel");
  }
}

std::span<const CompositePreset> composite_presets() { return kPresets; }

const CompositePreset& find_preset(std::string_view name) {
  for (const auto& p : kPresets) {
    if (p.name == name) return p;
  }
  throw InvalidArgumentError("unknown preset '" + std::string(name) + "'", "preset");
}

std::span<const double> published_angles() { return kPublishedAngles; }

}  // namespace dynspeckle
