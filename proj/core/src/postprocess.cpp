#include "dynspeckle/postprocess.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "dynspeckle/error.hpp"
#include "dynspeckle/format.hpp"
#include "dynspeckle/stack_io.hpp"

namespace dynspeckle {
namespace {

double parse_double(std::string_view text, const char* field) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw InvalidArgumentError("cannot parse number '" + std::string(text) + "'", field);
  }
  return v;
}

void require_unit(const RealImage& map) {
  for (double v : map.values) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw InvalidArgumentError("value outside [0, 1]", "map");
    }
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

Normalization Normalization::fixed(double lo, double hi) {
  Normalization n{Mode::kFixed, lo, hi};
  n.validate();
  return n;
}

Normalization Normalization::parse(std::string_view text) {
  if (text == "minmax") return min_max();
  constexpr std::string_view prefix = "fixed:";
  if (text.starts_with(prefix)) {
    const std::string_view rest = text.substr(prefix.size());
    const auto colon = rest.find(':');
    if (colon != std::string_view::npos) {
      return fixed(parse_double(rest.substr(0, colon), "norm"),
                   parse_double(rest.substr(colon + 1), "norm"));
    }
  }
  throw InvalidArgumentError("expected 'minmax' or 'fixed:<lo>:<hi>', got '" + std::string(text) +
                                 "'",
                             "norm");
}

std::string Normalization::to_string() const {
  if (mode == Mode::kMinMax) return "minmax";
  return "fixed:" + format_number(lo) + ":" + format_number(hi);
}

void Normalization::validate() const {
  if (mode == Mode::kFixed &&
      !(std::isfinite(lo) && std::isfinite(hi) && lo < hi)) {
    throw InvalidArgumentError("fixed range requires lo < hi", "norm");
  }
}

void DisplayParams::validate() const {
  if (!(std::isfinite(alpha) && alpha > 0.0)) {
    throw InvalidArgumentError("exponent must be positive", "alpha");
  }
  normalization.validate();
}

PseudocolorLut PseudocolorLut::identity_gray() {
  PseudocolorLut lut;
  lut.entries.resize(256);
  for (std::size_t i = 0; i < 256; ++i) {
    const auto g = static_cast<std::uint8_t>(i);
    lut.entries[i] = {g, g, g};
  }
  return lut;
}

void PseudocolorLut::validate() const {
  if (entries.size() != 256) {
    throw InvalidArgumentError("LUT must have exactly 256 entries, has " +
                                   std::to_string(entries.size()),
                               "lut");
  }
}

PseudocolorLut parse_lut_csv(std::string_view text) {
  PseudocolorLut lut;
  lut.entries.resize(256);
  std::vector<bool> seen(256, false);
  std::size_t rows = 0;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.empty()) continue;

    std::array<long, 4> fields{};
    std::size_t count = 0;
    while (true) {
      const auto comma = line.find(',');
      const std::string_view cell = trim(line.substr(0, comma));
      long v = -1;
      auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || ptr != cell.data() + cell.size() || count >= 4) {
        throw InvalidArgumentError("malformed LUT row at line " + std::to_string(line_no), "lut");
      }
      fields[count++] = v;
      if (comma == std::string_view::npos) break;
      line.remove_prefix(comma + 1);
    }
    if (count != 4) {
      throw InvalidArgumentError("LUT row needs index,r,g,b at line " + std::to_string(line_no),
                                 "lut");
    }
    for (long f : fields) {
      if (f < 0 || f > 255) {
        throw InvalidArgumentError("LUT value out of range at line " + std::to_string(line_no),
                                   "lut");
      }
    }
    const auto index = static_cast<std::size_t>(fields[0]);
    if (seen[index]) {
      throw InvalidArgumentError("duplicate LUT index " + std::to_string(index), "lut");
    }
    seen[index] = true;
    lut.entries[index] = {static_cast<std::uint8_t>(fields[1]), static_cast<std::uint8_t>(fields[2]),
                          static_cast<std::uint8_t>(fields[3])};
    ++rows;
  }
  if (rows != 256) {
    throw InvalidArgumentError("LUT must have exactly 256 rows, has " + std::to_string(rows), "lut");
  }
  return lut;
}

PseudocolorLut load_lut_csv(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  return parse_lut_csv(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

RealImage normalize_map(const RealImage& map, const Normalization& normalization) {
  normalization.validate();
  RealImage out(map.width, map.height);
  if (map.values.empty()) return out;
  for (double v : map.values) {
    if (!std::isfinite(v)) throw InvalidArgumentError("map contains non-finite values", "map");
  }
  if (normalization.mode == Normalization::Mode::kMinMax) {
    const auto [min_it, max_it] = std::minmax_element(map.values.begin(), map.values.end());
    const double lo = *min_it;
    const double range = *max_it - lo;
    if (range == 0.0) return out;  // constant map -> all zeros
    for (std::size_t i = 0; i < map.values.size(); ++i) {
      out.values[i] = (map.values[i] - lo) / range;
    }
  } else {
    const double range = normalization.hi - normalization.lo;
    for (std::size_t i = 0; i < map.values.size(); ++i) {
      out.values[i] = std::clamp((map.values[i] - normalization.lo) / range, 0.0, 1.0);
    }
  }
  return out;
}

RealImage apply_exponent(const RealImage& unit_map, double alpha) {
  if (!(std::isfinite(alpha) && alpha > 0.0)) {
    throw InvalidArgumentError("exponent must be positive", "alpha");
  }
  require_unit(unit_map);
  RealImage out = unit_map;
  if (alpha == 1.0) return out;
  for (double& v : out.values) v = std::pow(v, alpha);
  return out;
}

std::uint8_t quantize_u8(double unit_value) {
  if (!(unit_value >= 0.0 && unit_value <= 1.0)) {
    throw InvalidArgumentError("value outside [0, 1]", "map");
  }
  return static_cast<std::uint8_t>(std::floor(unit_value * 255.0 + 0.5));
}

GrayImage quantize_u8(const RealImage& unit_map) {
  GrayImage out(unit_map.width, unit_map.height);
  for (std::size_t i = 0; i < unit_map.values.size(); ++i) {
    out.pixels[i] = quantize_u8(unit_map.values[i]);
  }
  return out;
}

GrayImage render_gray(const RealImage& map, const DisplayParams& display) {
  display.validate();
  return quantize_u8(apply_exponent(normalize_map(map, display.normalization), display.alpha));
}

RgbImage compose_rgb(const CompositeSpec& spec) {
  const RealImage& r = spec.red.map.get();
  const RealImage& g = spec.green.map.get();
  const RealImage& b = spec.blue.map.get();
  if (!r.same_dims(g) || !r.same_dims(b)) {
    throw CompositionError("channel dimensions differ: R " + std::to_string(r.width) + "x" +
                           std::to_string(r.height) + ", G " + std::to_string(g.width) + "x" +
                           std::to_string(g.height) + ", B " + std::to_string(b.width) + "x" +
                           std::to_string(b.height));
  }
  const GrayImage cr = render_gray(r, spec.red.display);
  const GrayImage cg = render_gray(g, spec.green.display);
  const GrayImage cb = render_gray(b, spec.blue.display);
  RgbImage out(r.width, r.height);
  for (std::size_t i = 0; i < cr.pixels.size(); ++i) {
    out.pixels[3 * i] = cr.pixels[i];
    out.pixels[3 * i + 1] = cg.pixels[i];
    out.pixels[3 * i + 2] = cb.pixels[i];
  }
  return out;
}

RgbImage apply_pseudocolor(const RealImage& unit_map, const PseudocolorLut& lut) {
  lut.validate();
  const GrayImage index = quantize_u8(unit_map);
  RgbImage out(unit_map.width, unit_map.height);
  for (std::size_t i = 0; i < index.pixels.size(); ++i) {
    const auto& rgb = lut.entries[index.pixels[i]];
    std::copy(rgb.begin(), rgb.end(), out.pixels.begin() + static_cast<std::ptrdiff_t>(3 * i));
  }
  return out;
}

double psnr(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  if (a.size() != b.size()) throw InvalidArgumentError("image sizes differ", "image");
  if (a.empty()) throw InvalidArgumentError("images are empty", "image");
  double sse = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    sse += d * d;
  }
  if (sse == 0.0) return std::numeric_limits<double>::infinity();
  const double mse = sse / static_cast<double>(a.size());
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

double psnr(const GrayImage& a, const GrayImage& b) {
  if (a.width != b.width || a.height != b.height) {
    throw InvalidArgumentError("image dimensions differ", "image");
  }
  return psnr(std::span<const std::uint8_t>(a.pixels), std::span<const std::uint8_t>(b.pixels));
}

double psnr(const RgbImage& a, const RgbImage& b) {
  if (a.width != b.width || a.height != b.height) {
    throw InvalidArgumentError("image dimensions differ", "image");
  }
  return psnr(std::span<const std::uint8_t>(a.pixels), std::span<const std::uint8_t>(b.pixels));
}

}  // namespace dynspeckle
