#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "dynspeckle/image.hpp"

namespace dynspeckle {

/// Decoded 8-bit image with 1 (gray), 3 (RGB) or 4 (RGBA) channels.
struct DecodedImage {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::uint32_t channels = 0;
  std::vector<std::uint8_t> pixels;
};

// Binary PGM (P5), maxval 255.
std::vector<std::uint8_t> encode_pgm(const GrayImage& image);
GrayImage decode_pgm(std::span<const std::uint8_t> bytes);
void write_pgm(const GrayImage& image, const std::filesystem::path& path);
GrayImage read_pgm(const std::filesystem::path& path);

// 8-bit PNG through libpng. Encoding is deterministic (fixed compression
// settings, no timestamp chunk).
std::vector<std::uint8_t> encode_png(const GrayImage& image);
std::vector<std::uint8_t> encode_png(const RgbImage& image);
DecodedImage decode_png(std::span<const std::uint8_t> bytes);
void write_png(const GrayImage& image, const std::filesystem::path& path);
void write_png(const RgbImage& image, const std::filesystem::path& path);

/// Reads a PGM or PNG file, dispatching on content (magic bytes).
DecodedImage read_image(const std::filesystem::path& path);

/// Reads an image that must be single-channel 8-bit; anything else is a
/// FormatError.
GrayImage read_gray_image(const std::filesystem::path& path);

/// Writes a grayscale image as PGM or PNG, chosen by file extension.
void write_gray_image(const GrayImage& image, const std::filesystem::path& path);

/// F32M raw map: magic "F32M", u32 LE width, u32 LE height, then row-major
/// 32-bit LE floats.
std::vector<std::uint8_t> encode_f32m(const RealImage& map);
RealImage decode_f32m(std::span<const std::uint8_t> bytes);
void write_f32m(const RealImage& map, const std::filesystem::path& path);
RealImage read_f32m(const std::filesystem::path& path);

}  // namespace dynspeckle
