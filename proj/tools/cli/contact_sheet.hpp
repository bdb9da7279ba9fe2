#pragma once

#include <string>
#include <vector>

#include "dynspeckle/image.hpp"

namespace dynspeckle::cli {

inline constexpr std::size_t kTilesPerPage = 64;

struct Tile {
  GrayImage image;
  std::string label;
};

/// Lays tiles out on a grid, each with its label underneath. Tiles larger
/// than 256 px are shrunk by an integer factor. `columns` 0 picks a near
/// square grid. At most kTilesPerPage tiles are accepted.
GrayImage render_contact_sheet(const std::vector<Tile>& tiles, std::size_t columns = 0);

/// Width in pixels of `text` in the label font.
std::uint32_t label_width(const std::string& text);

}  // namespace dynspeckle::cli
