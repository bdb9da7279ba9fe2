#pragma once

#include <filesystem>
#include <string>

#include "dynspeckle/frame_stack.hpp"
#include "dynspeckle/image.hpp"

namespace dynspeckle::cli {

/// Lower-cased extension including the dot.
std::string extension_of(const std::filesystem::path& path);

void require_exists(const std::filesystem::path& path);

/// SPK1 file or directory of frames.
FrameStack load_stack(const std::filesystem::path& input);

/// Activity map from F32M, or an 8-bit PGM/PNG read as gray levels.
RealImage load_map(const std::filesystem::path& path);

}  // namespace dynspeckle::cli
