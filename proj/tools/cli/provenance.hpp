#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>

#include <json.hpp>

namespace dynspeckle::cli {

std::string sha256_hex(std::span<const std::uint8_t> bytes);
/// Streams the file through the digest.
std::string sha256_file(const std::filesystem::path& path);
/// Digest of a stack input: the file itself, or for a frame directory the
/// SPK1 serialization of the imported stack.
std::string stack_digest(const std::filesystem::path& input);

/// Base record every sidecar starts from.
nlohmann::json provenance_record(const std::string& command);

/// Writes `record` next to `output` as `<output>.json`.
void write_sidecar(const std::filesystem::path& output, const nlohmann::json& record);

}  // namespace dynspeckle::cli
