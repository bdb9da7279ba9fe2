#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "dynspeckle/frame_stack.hpp"

namespace dynspeckle {

/// SPK1 container layout (little-endian):
///   0..3   magic "SPK1"
///   4..7   u32 version (1)
///   8..11  u32 width
///   12..15 u32 height
///   16..19 u32 frames
///   20..23 u32 bit depth (8)
///   24..31 reserved, zero
/// followed by `frames` row-major u8 frames.
inline constexpr std::size_t kSpkHeaderSize = 32;
inline constexpr std::uint32_t kSpkVersion = 1;

struct SpkHeader {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::uint32_t frames = 0;

  std::size_t payload_size() const { return std::size_t{width} * height * frames; }
};

std::array<std::uint8_t, kSpkHeaderSize> encode_spk_header(const SpkHeader& header);
SpkHeader decode_spk_header(std::span<const std::uint8_t> bytes);

FrameStack read_stack(const std::filesystem::path& path);
void write_stack(const FrameStack& stack, const std::filesystem::path& path);

FrameStack parse_stack(std::span<const std::uint8_t> bytes, std::string label = {});
std::vector<std::uint8_t> serialize_stack(const FrameStack& stack);

/// Streams frames from an SPK1 file without loading the payload. The payload
/// length is checked against the header on open.
class SpkFileSource final : public FrameSource {
 public:
  explicit SpkFileSource(const std::filesystem::path& path);

  std::uint32_t width() const override { return header_.width; }
  std::uint32_t height() const override { return header_.height; }
  std::uint32_t frame_count() const override { return header_.frames; }
  std::string label() const override { return label_; }
  void read_frames(std::span<std::uint8_t> dst) override;
  void rewind() override;

 private:
  std::filesystem::path path_;
  std::ifstream in_;
  SpkHeader header_;
  std::string label_;
};

/// Writes an SPK1 file frame by frame. Data goes to a temporary sibling file
/// that is renamed over `path` by `commit()`; an uncommitted writer removes
/// its temporary on destruction.
class SpkWriter {
 public:
  SpkWriter(const std::filesystem::path& path, std::uint32_t width, std::uint32_t height,
            std::uint32_t frames);
  SpkWriter(const SpkWriter&) = delete;
  SpkWriter& operator=(const SpkWriter&) = delete;
  ~SpkWriter();

  void write_frame(std::span<const std::uint8_t> frame);
  void commit();

 private:
  std::filesystem::path path_;
  std::filesystem::path temp_path_;
  std::ofstream out_;
  SpkHeader header_;
  std::uint32_t written_ = 0;
  bool committed_ = false;
};

/// Loads every *.pgm / *.png file in `dir`, ordered by filename.
FrameStack import_frame_dir(const std::filesystem::path& dir);

/// Block-mean spatial reduction (round half-up, trailing remainder dropped)
/// combined with temporal decimation keeping frames 0, stride, 2*stride, ...
FrameStack downsample(const FrameStack& stack, std::uint32_t spatial_factor,
                      std::uint32_t temporal_stride);

/// Writes `bytes` to `path` through a temporary file and rename.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);

}  // namespace dynspeckle
