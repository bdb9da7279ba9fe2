#include "common.hpp"

#include <algorithm>
#include <cctype>

#include "dynspeckle/edges.hpp"
#include "dynspeckle/error.hpp"
#include "dynspeckle/image_io.hpp"
#include "dynspeckle/stack_io.hpp"

namespace dynspeckle::cli {

std::string extension_of(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

void require_exists(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw IoError("no such file or directory: " + path.string());
}

FrameStack load_stack(const std::filesystem::path& input) {
  require_exists(input);
  return std::filesystem::is_directory(input) ? import_frame_dir(input) : read_stack(input);
}

RealImage load_map(const std::filesystem::path& path) {
  require_exists(path);
  if (extension_of(path) == ".f32m") return read_f32m(path);
  return to_real(read_gray_image(path));
}

}  // namespace dynspeckle::cli
