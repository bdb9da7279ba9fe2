#include "contact_sheet.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "dynspeckle/error.hpp"

namespace dynspeckle::cli {
namespace {

constexpr std::uint32_t kGlyphW = 5;
constexpr std::uint32_t kGlyphH = 7;
constexpr std::uint32_t kAdvance = kGlyphW + 1;
constexpr std::uint32_t kPad = 4;
constexpr std::uint32_t kGap = 10;
constexpr std::uint32_t kMaxTile = 256;

struct Glyph {
  char c;
  std::array<std::uint8_t, kGlyphH> rows;  // bit 4 is the leftmost column
};

// Only the characters that can appear in sweep labels.
constexpr Glyph kFont[] = {
    {'0', {0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E}},
    {'1', {0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E}},
    {'2', {0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F}},
    {'3', {0x1F, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0E}},
    {'4', {0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02}},
    {'5', {0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E}},
    {'6', {0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E}},
    {'7', {0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08}},
    {'8', {0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E}},
    {'9', {0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C}},
    {'.', {0x00, 0x00, 0x00, 0x00, 0x00, 0x0C, 0x0C}},
    {'-', {0x00, 0x00, 0x00, 0x1F, 0x00, 0x00, 0x00}},
    {'+', {0x00, 0x04, 0x04, 0x1F, 0x04, 0x04, 0x00}},
    {'=', {0x00, 0x00, 0x1F, 0x00, 0x1F, 0x00, 0x00}},
    {'a', {0x00, 0x00, 0x0E, 0x01, 0x0F, 0x11, 0x0F}},
    {'d', {0x01, 0x01, 0x0D, 0x13, 0x11, 0x11, 0x0F}},
    {'e', {0x00, 0x00, 0x0E, 0x11, 0x1F, 0x10, 0x0E}},
    {'f', {0x06, 0x09, 0x08, 0x1C, 0x08, 0x08, 0x08}},
    {'g', {0x00, 0x0F, 0x11, 0x11, 0x0F, 0x01, 0x0E}},
    {'h', {0x10, 0x10, 0x16, 0x19, 0x11, 0x11, 0x11}},
    {'i', {0x04, 0x00, 0x0C, 0x04, 0x04, 0x04, 0x0E}},
    {'j', {0x02, 0x00, 0x06, 0x02, 0x02, 0x12, 0x0C}},
    {'p', {0x00, 0x00, 0x1E, 0x11, 0x1E, 0x10, 0x10}},
    {'t', {0x08, 0x08, 0x1C, 0x08, 0x08, 0x09, 0x06}},
    {'u', {0x00, 0x00, 0x11, 0x11, 0x11, 0x13, 0x0D}},
    {'v', {0x00, 0x00, 0x11, 0x11, 0x11, 0x0A, 0x04}},
};

const Glyph* find_glyph(char c) {
  for (const auto& g : kFont) {
    if (g.c == c) return &g;
  }
  return nullptr;
}

void draw_text(GrayImage& img, std::uint32_t x0, std::uint32_t y0, const std::string& text) {
  std::uint32_t x = x0;
  for (char c : text) {
    if (const Glyph* g = find_glyph(c)) {
      for (std::uint32_t r = 0; r < kGlyphH; ++r) {
        for (std::uint32_t col = 0; col < kGlyphW; ++col) {
          if ((g->rows[r] >> (kGlyphW - 1 - col)) & 1) {
            if (x + col < img.width && y0 + r < img.height) img.at(x + col, y0 + r) = 255;
          }
        }
      }
    }
    x += kAdvance;
  }
}

GrayImage shrink(const GrayImage& in) {
  const std::uint32_t f = (std::max(in.width, in.height) + kMaxTile - 1) / kMaxTile;
  if (f <= 1) return in;
  GrayImage out(std::max(1u, in.width / f), std::max(1u, in.height / f));
  for (std::uint32_t y = 0; y < out.height; ++y) {
    for (std::uint32_t x = 0; x < out.width; ++x) {
      std::uint32_t sum = 0, n = 0;
      for (std::uint32_t dy = 0; dy < f && y * f + dy < in.height; ++dy) {
        for (std::uint32_t dx = 0; dx < f && x * f + dx < in.width; ++dx) {
          sum += in.at(x * f + dx, y * f + dy);
          ++n;
        }
      }
      out.at(x, y) = static_cast<std::uint8_t>((2 * sum + n) / (2 * n));
    }
  }
  return out;
}

}  // namespace

std::uint32_t label_width(const std::string& text) {
  return text.empty() ? 0 : static_cast<std::uint32_t>(text.size()) * kAdvance - 1;
}

GrayImage render_contact_sheet(const std::vector<Tile>& tiles, std::size_t columns) {
  if (tiles.empty()) throw InvalidArgumentError("nothing to lay out", "tiles");
  if (tiles.size() > kTilesPerPage) {
    throw InvalidArgumentError("more than " + std::to_string(kTilesPerPage) + " tiles", "tiles");
  }
  std::vector<GrayImage> shrunk;
  std::uint32_t cell_w = 0, cell_h = 0;
  for (const auto& t : tiles) {
    shrunk.push_back(shrink(t.image));
    cell_w = std::max({cell_w, shrunk.back().width, label_width(t.label)});
    cell_h = std::max(cell_h, shrunk.back().height);
  }
  if (columns == 0) columns = static_cast<std::size_t>(std::ceil(std::sqrt(double(tiles.size()))));
  columns = std::min(columns, tiles.size());
  const std::size_t rows = (tiles.size() + columns - 1) / columns;
  const std::uint32_t step_x = cell_w + kGap;
  const std::uint32_t step_y = cell_h + kGlyphH + 2 * kPad;

  GrayImage sheet(static_cast<std::uint32_t>(columns) * step_x - kGap + 2 * kPad,
                  static_cast<std::uint32_t>(rows) * step_y + kPad);
  for (std::size_t i = 0; i < tiles.size(); ++i) {
    const std::uint32_t x0 = kPad + static_cast<std::uint32_t>(i % columns) * step_x;
    const std::uint32_t y0 = kPad + static_cast<std::uint32_t>(i / columns) * step_y;
    const GrayImage& img = shrunk[i];
    for (std::uint32_t y = 0; y < img.height; ++y) {
      std::copy_n(img.pixels.begin() + std::size_t{y} * img.width, img.width,
                  sheet.pixels.begin() + std::size_t{y0 + y} * sheet.width + x0);
    }
    draw_text(sheet, x0, y0 + cell_h + kPad, tiles[i].label);
  }
  return sheet;
}

}  // namespace dynspeckle::cli
