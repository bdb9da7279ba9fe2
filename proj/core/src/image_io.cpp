#include "dynspeckle/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <string>

#include "dynspeckle/error.hpp"
#include "dynspeckle/stack_io.hpp"

namespace dynspeckle {
namespace fs = std::filesystem;

namespace {

constexpr std::array<std::uint8_t, 8> kPngSignature = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
constexpr std::array<std::uint8_t, 4> kF32mMagic = {'F', '3', '2', 'M'};

bool is_png(std::span<const std::uint8_t> bytes) {
  return bytes.size() >= kPngSignature.size() &&
         std::equal(kPngSignature.begin(), kPngSignature.end(), bytes.begin());
}

// Minimal PNM header tokenizer: whitespace separated integers with '#'
// comments, as used by P5 headers.
class PnmHeaderReader {
 public:
  explicit PnmHeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes), pos_(2) {}

  std::uint32_t next_int() {
    skip_space_and_comments();
    std::uint64_t v = 0;
    std::size_t digits = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      v = v * 10 + (bytes_[pos_++] - '0');
      if (v > 0xFFFFFFFFull) throw InvalidHeaderError("PGM header value too large");
      ++digits;
    }
    if (digits == 0) throw FormatError("malformed PGM header");
    return static_cast<std::uint32_t>(v);
  }

  // Exactly one whitespace byte separates maxval from the raster.
  std::size_t raster_offset() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      throw FormatError("malformed PGM header");
    }
    return pos_ + 1;
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_;
};

std::vector<std::uint8_t> png_encode(std::uint32_t width, std::uint32_t height,
                                     std::uint32_t format, const std::uint8_t* pixels) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = width;
  image.height = height;
  image.format = format;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, pixels, 0, nullptr)) {
    throw IoError(std::string("PNG encode failed: ") + image.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, pixels, 0, nullptr)) {
    throw IoError(std::string("PNG encode failed: ") + image.message);
  }
  out.resize(size);
  return out;
}

std::string lower_extension(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

}  // namespace

std::vector<std::uint8_t> encode_pgm(const GrayImage& image) {
  const std::string header = "P5\n" + std::to_string(image.width) + " " +
                             std::to_string(image.height) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), image.pixels.begin(), image.pixels.end());
  return out;
}

GrayImage decode_pgm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
    throw FormatError("not a binary PGM (P5) image");
  }
  PnmHeaderReader reader(bytes);
  const std::uint32_t width = reader.next_int();
  const std::uint32_t height = reader.next_int();
  const std::uint32_t maxval = reader.next_int();
  if (width == 0 || height == 0) throw InvalidHeaderError("PGM has zero dimension");
  if (maxval == 0 || maxval > 255) {
    throw FormatError("only 8-bit PGM is supported (maxval " + std::to_string(maxval) + ")");
  }
  const std::size_t offset = reader.raster_offset();
  GrayImage image(width, height);
  if (bytes.size() - offset < image.pixels.size()) throw CorruptStackError("PGM raster truncated");
  std::copy_n(bytes.begin() + static_cast<std::ptrdiff_t>(offset), image.pixels.size(),
              image.pixels.begin());
  return image;
}

void write_pgm(const GrayImage& image, const fs::path& path) {
  write_file_atomic(path, encode_pgm(image));
}

GrayImage read_pgm(const fs::path& path) { return decode_pgm(read_file_bytes(path)); }

std::vector<std::uint8_t> encode_png(const GrayImage& image) {
  return png_encode(image.width, image.height, PNG_FORMAT_GRAY, image.pixels.data());
}

std::vector<std::uint8_t> encode_png(const RgbImage& image) {
  return png_encode(image.width, image.height, PNG_FORMAT_RGB, image.pixels.data());
}

DecodedImage decode_png(std::span<const std::uint8_t> bytes) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw FormatError(std::string("PNG decode failed: ") + image.message);
  }
  if (image.format & PNG_FORMAT_FLAG_LINEAR) {
    png_image_free(&image);
    throw FormatError("16-bit PNG is not supported");
  }
  const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  const bool alpha = (image.format & PNG_FORMAT_FLAG_ALPHA) != 0;
  DecodedImage out;
  if (!color) {
    image.format = PNG_FORMAT_GRAY;
    out.channels = 1;
  } else {
    image.format = alpha ? PNG_FORMAT_RGBA : PNG_FORMAT_RGB;
    out.channels = alpha ? 4 : 3;
  }
  out.width = image.width;
  out.height = image.height;
  out.pixels.resize(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, out.pixels.data(), 0, nullptr)) {
    throw FormatError(std::string("PNG decode failed: ") + image.message);
  }
  return out;
}

void write_png(const GrayImage& image, const fs::path& path) {
  write_file_atomic(path, encode_png(image));
}

void write_png(const RgbImage& image, const fs::path& path) {
  write_file_atomic(path, encode_png(image));
}

DecodedImage read_image(const fs::path& path) {
  const auto bytes = read_file_bytes(path);
  if (is_png(bytes)) return decode_png(bytes);
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '5') {
    GrayImage g = decode_pgm(bytes);
    return DecodedImage{g.width, g.height, 1, std::move(g.pixels)};
  }
  throw FormatError("unsupported image format: " + path.string());
}

GrayImage read_gray_image(const fs::path& path) {
  DecodedImage img = read_image(path);
  if (img.channels != 1) {
    throw FormatError(path.filename().string() + " is not a grayscale image");
  }
  GrayImage out;
  out.width = img.width;
  out.height = img.height;
  out.pixels = std::move(img.pixels);
  return out;
}

void write_gray_image(const GrayImage& image, const fs::path& path) {
  const std::string ext = lower_extension(path);
  if (ext == ".png") {
    write_png(image, path);
  } else if (ext == ".pgm") {
    write_pgm(image, path);
  } else {
    throw InvalidArgumentError("unsupported image extension '" + ext + "'", "output");
  }
}

std::vector<std::uint8_t> encode_f32m(const RealImage& map) {
  std::vector<std::uint8_t> out(12 + map.values.size() * 4);
  std::copy(kF32mMagic.begin(), kF32mMagic.end(), out.begin());
  auto put = [&out](std::size_t at, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out[at + i] = static_cast<std::uint8_t>(v >> (8 * i));
  };
  put(4, map.width);
  put(8, map.height);
  for (std::size_t i = 0; i < map.values.size(); ++i) {
    put(12 + 4 * i, std::bit_cast<std::uint32_t>(static_cast<float>(map.values[i])));
  }
  return out;
}

RealImage decode_f32m(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || !std::equal(kF32mMagic.begin(), kF32mMagic.end(), bytes.begin())) {
    throw FormatError("not an F32M map (bad magic)");
  }
  if (bytes.size() < 12) throw CorruptStackError("F32M header truncated");
  auto get = [&bytes](std::size_t at) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t{bytes[at + i]} << (8 * i);
    return v;
  };
  const std::uint32_t width = get(4);
  const std::uint32_t height = get(8);
  if (width == 0 || height == 0) throw InvalidHeaderError("F32M declares a zero dimension");
  const std::size_t count = std::size_t{width} * height;
  if (bytes.size() != 12 + count * 4) {
    throw CorruptStackError("F32M payload size does not match " + std::to_string(width) + "x" +
                            std::to_string(height));
  }
  RealImage map(width, height);
  for (std::size_t i = 0; i < count; ++i) {
    map.values[i] = std::bit_cast<float>(get(12 + 4 * i));
  }
  return map;
}

void write_f32m(const RealImage& map, const fs::path& path) {
  write_file_atomic(path, encode_f32m(map));
}

RealImage read_f32m(const fs::path& path) { return decode_f32m(read_file_bytes(path)); }

}  // namespace dynspeckle
