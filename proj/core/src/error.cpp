#include "dynspeckle/error.hpp"

namespace dynspeckle {

InsufficientFramesError::InsufficientFramesError(std::size_t required, std::size_t available)
    : Error("insufficient frames: need at least " + std::to_string(required) + ", stack has " +
            std::to_string(available)),
      required_(required),
      available_(available) {}

InvalidArgumentError::InvalidArgumentError(const std::string& message, std::string field)
    : Error(field.empty() ? message : field + ": " + message), field_(std::move(field)) {}

}  // namespace dynspeckle
