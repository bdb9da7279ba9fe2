#include "dynspeckle/frame_stack.hpp"

#include <algorithm>
#include <cmath>

#include "dynspeckle/error.hpp"

namespace dynspeckle {

void StackMetadata::validate() const {
  if (wavelength_nm && !(std::isfinite(*wavelength_nm) && *wavelength_nm > 0.0)) {
    throw InvalidArgumentError("must be positive", "wavelength_nm");
  }
  if (frame_interval_s && !(std::isfinite(*frame_interval_s) && *frame_interval_s > 0.0)) {
    throw InvalidArgumentError("must be positive", "frame_interval");
  }
}

FrameStack::FrameStack(std::uint32_t width, std::uint32_t height, std::uint32_t frames,
                       std::vector<std::uint8_t> data, StackMetadata metadata)
    : width_(width), height_(height), frames_(frames), data_(std::move(data)) {
  if (width == 0 || height == 0) {
    throw InvalidHeaderError("stack dimensions must be non-zero");
  }
  if (frames == 0) {
    throw InvalidArgumentError("stack must contain at least one frame", "frames");
  }
  const std::size_t expected = std::size_t{width} * height * frames;
  if (data_.size() != expected) {
    throw CorruptStackError("stack payload holds " + std::to_string(data_.size()) +
                            " bytes, expected " + std::to_string(expected));
  }
  set_metadata(std::move(metadata));
}

std::span<const std::uint8_t> FrameStack::frame(std::uint32_t k) const {
  if (k >= frames_) {
    throw InvalidArgumentError("frame index out of range", "frame");
  }
  return std::span<const std::uint8_t>(data_).subspan(k * pixel_count(), pixel_count());
}

void FrameStack::set_metadata(StackMetadata metadata) {
  metadata.validate();
  metadata_ = std::move(metadata);
}

void StackFrameSource::read_frames(std::span<std::uint8_t> dst) {
  const auto all = stack_.data();
  if (offset_ + dst.size() > all.size()) {
    throw CorruptStackError("read past the end of the stack");
  }
  std::copy_n(all.begin() + static_cast<std::ptrdiff_t>(offset_), dst.size(), dst.begin());
  offset_ += dst.size();
}

}  // namespace dynspeckle
