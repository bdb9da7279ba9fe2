#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dynspeckle {

/// Acquisition context carried alongside a stack. Informational only; no
/// computation reads it.
struct StackMetadata {
  std::optional<double> wavelength_nm;
  std::string label;
  std::optional<double> frame_interval_s;

  void validate() const;
};

/// Ordered sequence of equal-size 8-bit grayscale frames, stored frame-major
/// and row-major. Immutable after construction.
class FrameStack {
 public:
  FrameStack() = default;
  FrameStack(std::uint32_t width, std::uint32_t height, std::uint32_t frames,
             std::vector<std::uint8_t> data, StackMetadata metadata = {});

  std::uint32_t width() const noexcept { return width_; }
  std::uint32_t height() const noexcept { return height_; }
  std::uint32_t frame_count() const noexcept { return frames_; }
  std::size_t pixel_count() const noexcept { return std::size_t{width_} * height_; }
  bool empty() const noexcept { return frames_ == 0; }

  std::span<const std::uint8_t> data() const noexcept { return data_; }
  std::span<const std::uint8_t> frame(std::uint32_t k) const;
  std::uint8_t at(std::uint32_t k, std::uint32_t x, std::uint32_t y) const {
    return data_[k * pixel_count() + std::size_t{y} * width_ + x];
  }

  const StackMetadata& metadata() const noexcept { return metadata_; }
  void set_metadata(StackMetadata metadata);

  friend bool operator==(const FrameStack& a, const FrameStack& b) {
    return a.width_ == b.width_ && a.height_ == b.height_ && a.frames_ == b.frames_ &&
           a.data_ == b.data_;
  }

 private:
  std::uint32_t width_ = 0;
  std::uint32_t height_ = 0;
  std::uint32_t frames_ = 0;
  std::vector<std::uint8_t> data_;
  StackMetadata metadata_;
};

/// Sequential frame producer consumed by the streaming descriptor engine.
/// Implementations hand out frames in ascending order; `rewind` restarts at
/// frame 0.
class FrameSource {
 public:
  virtual ~FrameSource() = default;

  virtual std::uint32_t width() const = 0;
  virtual std::uint32_t height() const = 0;
  virtual std::uint32_t frame_count() const = 0;
  virtual std::string label() const { return {}; }

  /// Fills `dst` with the next dst.size() / pixel_count() frames.
  virtual void read_frames(std::span<std::uint8_t> dst) = 0;
  virtual void rewind() = 0;

  std::size_t pixel_count() const { return std::size_t{width()} * height(); }
};

/// FrameSource over an in-memory stack.
class StackFrameSource final : public FrameSource {
 public:
  explicit StackFrameSource(const FrameStack& stack) : stack_(stack) {}

  std::uint32_t width() const override { return stack_.width(); }
  std::uint32_t height() const override { return stack_.height(); }
  std::uint32_t frame_count() const override { return stack_.frame_count(); }
  std::string label() const override { return stack_.metadata().label; }
  void read_frames(std::span<std::uint8_t> dst) override;
  void rewind() override { offset_ = 0; }

 private:
  const FrameStack& stack_;
  std::size_t offset_ = 0;
};

}  // namespace dynspeckle
