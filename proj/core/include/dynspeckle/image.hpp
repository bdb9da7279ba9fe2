#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace dynspeckle {

/// Row-major real-valued image. Activity maps, unit-interval display maps and
/// edge-detection intermediates all use this.
struct RealImage {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<double> values;

  RealImage() = default;
  RealImage(std::uint32_t w, std::uint32_t h, double fill = 0.0)
      : width(w), height(h), values(std::size_t{w} * h, fill) {}
  RealImage(std::uint32_t w, std::uint32_t h, std::vector<double> v)
      : width(w), height(h), values(std::move(v)) {}

  std::size_t size() const noexcept { return values.size(); }
  double& at(std::uint32_t x, std::uint32_t y) { return values[std::size_t{y} * width + x]; }
  double at(std::uint32_t x, std::uint32_t y) const { return values[std::size_t{y} * width + x]; }
  bool same_dims(const RealImage& o) const noexcept {
    return width == o.width && height == o.height;
  }
};

/// 8-bit single-channel image.
struct GrayImage {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<std::uint8_t> pixels;

  GrayImage() = default;
  GrayImage(std::uint32_t w, std::uint32_t h, std::uint8_t fill = 0)
      : width(w), height(h), pixels(std::size_t{w} * h, fill) {}

  std::uint8_t& at(std::uint32_t x, std::uint32_t y) { return pixels[std::size_t{y} * width + x]; }
  std::uint8_t at(std::uint32_t x, std::uint32_t y) const {
    return pixels[std::size_t{y} * width + x];
  }
  friend bool operator==(const GrayImage&, const GrayImage&) = default;
};

/// 8-bit interleaved RGB image.
struct RgbImage {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<std::uint8_t> pixels;  // r,g,b per pixel

  RgbImage() = default;
  RgbImage(std::uint32_t w, std::uint32_t h) : width(w), height(h), pixels(std::size_t{w} * h * 3) {}

  std::array<std::uint8_t, 3> at(std::uint32_t x, std::uint32_t y) const {
    const std::size_t i = (std::size_t{y} * width + x) * 3;
    return {pixels[i], pixels[i + 1], pixels[i + 2]};
  }
  void set(std::uint32_t x, std::uint32_t y, std::array<std::uint8_t, 3> rgb) {
    const std::size_t i = (std::size_t{y} * width + x) * 3;
    pixels[i] = rgb[0];
    pixels[i + 1] = rgb[1];
    pixels[i + 2] = rgb[2];
  }
  friend bool operator==(const RgbImage&, const RgbImage&) = default;
};

}  // namespace dynspeckle
