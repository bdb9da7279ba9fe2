#include "dynspeckle/format.hpp"

#include <charconv>

namespace dynspeckle {

std::string format_number(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

}  // namespace dynspeckle
