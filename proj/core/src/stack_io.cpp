#include "dynspeckle/stack_io.hpp"

#include <algorithm>
#include <cstring>
#include <iterator>

#include "dynspeckle/error.hpp"
#include "dynspeckle/image_io.hpp"

namespace dynspeckle {
namespace fs = std::filesystem;

namespace {

constexpr std::array<std::uint8_t, 4> kSpkMagic = {'S', 'P', 'K', '1'};

void put_u32(std::uint8_t* out, std::uint32_t v) {
  out[0] = static_cast<std::uint8_t>(v);
  out[1] = static_cast<std::uint8_t>(v >> 8);
  out[2] = static_cast<std::uint8_t>(v >> 16);
  out[3] = static_cast<std::uint8_t>(v >> 24);
}

std::uint32_t get_u32(const std::uint8_t* in) {
  return std::uint32_t{in[0]} | (std::uint32_t{in[1]} << 8) | (std::uint32_t{in[2]} << 16) |
         (std::uint32_t{in[3]} << 24);
}

fs::path temp_sibling(const fs::path& path) {
  fs::path tmp = path;
  tmp += ".partial";
  return tmp;
}

}  // namespace

std::array<std::uint8_t, kSpkHeaderSize> encode_spk_header(const SpkHeader& header) {
  std::array<std::uint8_t, kSpkHeaderSize> out{};
  std::copy(kSpkMagic.begin(), kSpkMagic.end(), out.begin());
  put_u32(&out[4], kSpkVersion);
  put_u32(&out[8], header.width);
  put_u32(&out[12], header.height);
  put_u32(&out[16], header.frames);
  put_u32(&out[20], 8);
  return out;
}

SpkHeader decode_spk_header(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kSpkMagic.size() ||
      !std::equal(kSpkMagic.begin(), kSpkMagic.end(), bytes.begin())) {
    throw FormatError("not an SPK1 stack (bad magic)");
  }
  if (bytes.size() < kSpkHeaderSize) {
    throw CorruptStackError("SPK1 header truncated");
  }
  const std::uint32_t version = get_u32(&bytes[4]);
  if (version != kSpkVersion) {
    throw InvalidHeaderError("unsupported SPK version " + std::to_string(version));
  }
  SpkHeader h;
  h.width = get_u32(&bytes[8]);
  h.height = get_u32(&bytes[12]);
  h.frames = get_u32(&bytes[16]);
  const std::uint32_t depth = get_u32(&bytes[20]);
  if (h.width == 0 || h.height == 0 || h.frames == 0) {
    throw InvalidHeaderError("SPK1 header declares a zero dimension");
  }
  if (depth != 8) {
    throw InvalidHeaderError("unsupported bit depth " + std::to_string(depth));
  }
  return h;
}

FrameStack parse_stack(std::span<const std::uint8_t> bytes, std::string label) {
  const SpkHeader h = decode_spk_header(bytes);
  const std::size_t payload = h.payload_size();
  const std::size_t available = bytes.size() - kSpkHeaderSize;
  if (available < payload) {
    throw CorruptStackError("SPK1 payload truncated: header declares " + std::to_string(h.frames) +
                            " frames, file holds " +
                            std::to_string(available / (std::size_t{h.width} * h.height)));
  }
  if (available > payload) {
    throw CorruptStackError("SPK1 payload has " + std::to_string(available - payload) +
                            " trailing bytes");
  }
  std::vector<std::uint8_t> data(bytes.begin() + kSpkHeaderSize, bytes.end());
  StackMetadata meta;
  meta.label = std::move(label);
  return FrameStack(h.width, h.height, h.frames, std::move(data), std::move(meta));
}

std::vector<std::uint8_t> serialize_stack(const FrameStack& stack) {
  if (stack.empty()) {
    throw InvalidArgumentError("cannot serialize a stack without frames", "frames");
  }
  const auto header = encode_spk_header({stack.width(), stack.height(), stack.frame_count()});
  std::vector<std::uint8_t> out(kSpkHeaderSize + stack.data().size());
  std::copy(header.begin(), header.end(), out.begin());
  std::copy(stack.data().begin(), stack.data().end(), out.begin() + kSpkHeaderSize);
  return out;
}

FrameStack read_stack(const fs::path& path) {
  const auto bytes = read_file_bytes(path);
  return parse_stack(bytes, path.stem().string());
}

void write_stack(const FrameStack& stack, const fs::path& path) {
  if (stack.empty()) {
    throw InvalidArgumentError("cannot write a stack without frames", "frames");
  }
  SpkWriter writer(path, stack.width(), stack.height(), stack.frame_count());
  for (std::uint32_t k = 0; k < stack.frame_count(); ++k) writer.write_frame(stack.frame(k));
  writer.commit();
}

SpkFileSource::SpkFileSource(const fs::path& path) : path_(path), label_(path.stem().string()) {
  in_.open(path, std::ios::binary);
  if (!in_) throw IoError("cannot open " + path.string());
  std::array<std::uint8_t, kSpkHeaderSize> raw{};
  in_.read(reinterpret_cast<char*>(raw.data()), raw.size());
  header_ = decode_spk_header(std::span<const std::uint8_t>(raw.data(), in_.gcount()));
  std::error_code ec;
  const auto size = fs::file_size(path, ec);
  if (ec) throw IoError("cannot stat " + path.string());
  if (size != kSpkHeaderSize + header_.payload_size()) {
    throw CorruptStackError("SPK1 payload size " + std::to_string(size - kSpkHeaderSize) +
                            " does not match header (" + std::to_string(header_.payload_size()) +
                            " bytes)");
  }
}

void SpkFileSource::read_frames(std::span<std::uint8_t> dst) {
  in_.read(reinterpret_cast<char*>(dst.data()), static_cast<std::streamsize>(dst.size()));
  if (static_cast<std::size_t>(in_.gcount()) != dst.size()) {
    throw CorruptStackError("unexpected end of stack data in " + path_.string());
  }
}

void SpkFileSource::rewind() {
  in_.clear();
  in_.seekg(static_cast<std::streamoff>(kSpkHeaderSize));
}

SpkWriter::SpkWriter(const fs::path& path, std::uint32_t width, std::uint32_t height,
                     std::uint32_t frames)
    : path_(path), temp_path_(temp_sibling(path)), header_{width, height, frames} {
  if (width == 0 || height == 0) throw InvalidArgumentError("dimensions must be non-zero", "size");
  if (frames == 0) throw InvalidArgumentError("stack must contain at least one frame", "frames");
  out_.open(temp_path_, std::ios::binary | std::ios::trunc);
  if (!out_) throw IoError("cannot write " + path.string());
  const auto header = encode_spk_header(header_);
  out_.write(reinterpret_cast<const char*>(header.data()), header.size());
}

SpkWriter::~SpkWriter() {
  if (!committed_) {
    out_.close();
    std::error_code ec;
    fs::remove(temp_path_, ec);
  }
}

void SpkWriter::write_frame(std::span<const std::uint8_t> frame) {
  if (frame.size() != std::size_t{header_.width} * header_.height) {
    throw DimensionMismatchError("frame size does not match stack dimensions");
  }
  if (written_ >= header_.frames) throw InvalidArgumentError("more frames than declared", "frames");
  out_.write(reinterpret_cast<const char*>(frame.data()), static_cast<std::streamsize>(frame.size()));
  ++written_;
}

void SpkWriter::commit() {
  if (written_ != header_.frames) {
    throw CorruptStackError("wrote " + std::to_string(written_) + " of " +
                            std::to_string(header_.frames) + " declared frames");
  }
  out_.flush();
  if (!out_) throw IoError("write failed for " + path_.string());
  out_.close();
  std::error_code ec;
  fs::rename(temp_path_, path_, ec);
  if (ec) throw IoError("cannot move stack into place at " + path_.string() + ": " + ec.message());
  committed_ = true;
}

FrameStack import_frame_dir(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw IoError("not a directory: " + dir.string());

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (ext == ".pgm" || ext == ".png") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) {
              return a.filename().string() < b.filename().string();
            });
  if (files.size() < 2) {
    throw InsufficientFramesError(2, files.size());
  }

  std::vector<std::uint8_t> data;
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  for (const auto& file : files) {
    const GrayImage frame = read_gray_image(file);
    if (data.empty()) {
      width = frame.width;
      height = frame.height;
      data.reserve(std::size_t{width} * height * files.size());
    } else if (frame.width != width || frame.height != height) {
      throw DimensionMismatchError(file.filename().string() + " is " + std::to_string(frame.width) +
                                   "x" + std::to_string(frame.height) + ", expected " +
                                   std::to_string(width) + "x" + std::to_string(height));
    }
    data.insert(data.end(), frame.pixels.begin(), frame.pixels.end());
  }
  StackMetadata meta;
  meta.label = dir.filename().empty() ? dir.parent_path().filename().string()
                                      : dir.filename().string();
  return FrameStack(width, height, static_cast<std::uint32_t>(files.size()), std::move(data),
                    std::move(meta));
}

FrameStack downsample(const FrameStack& stack, std::uint32_t spatial_factor,
                      std::uint32_t temporal_stride) {
  if (spatial_factor == 0) throw InvalidArgumentError("must be positive", "spatial_factor");
  if (temporal_stride == 0) throw InvalidArgumentError("must be positive", "temporal_stride");
  const std::uint32_t out_w = stack.width() / spatial_factor;
  const std::uint32_t out_h = stack.height() / spatial_factor;
  if (out_w == 0 || out_h == 0) {
    throw InvalidArgumentError("factor exceeds stack dimensions", "spatial_factor");
  }
  const std::uint32_t out_n = (stack.frame_count() + temporal_stride - 1) / temporal_stride;
  const std::uint32_t block = spatial_factor * spatial_factor;

  std::vector<std::uint8_t> data(std::size_t{out_w} * out_h * out_n);
  std::size_t o = 0;
  for (std::uint32_t n = 0; n < out_n; ++n) {
    const std::uint32_t k = n * temporal_stride;
    for (std::uint32_t y = 0; y < out_h; ++y) {
      for (std::uint32_t x = 0; x < out_w; ++x) {
        std::uint32_t sum = 0;
        for (std::uint32_t dy = 0; dy < spatial_factor; ++dy) {
          for (std::uint32_t dx = 0; dx < spatial_factor; ++dx) {
            sum += stack.at(k, x * spatial_factor + dx, y * spatial_factor + dy);
          }
        }
        // round half-up of sum / block in integer arithmetic
        data[o++] = static_cast<std::uint8_t>((2 * sum + block) / (2 * block));
      }
    }
  }
  return FrameStack(out_w, out_h, out_n, std::move(data), stack.metadata());
}

void write_file_atomic(const fs::path& path, std::span<const std::uint8_t> bytes) {
  const fs::path tmp = temp_sibling(path);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      out.close();
      std::error_code ec;
      fs::remove(tmp, ec);
      throw IoError("write failed for " + path.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move file into place at " + path.string());
  }
}

std::vector<std::uint8_t> read_file_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

}  // namespace dynspeckle
