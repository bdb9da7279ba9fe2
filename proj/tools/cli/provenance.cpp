#include "provenance.hpp"

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <memory>

#include "dynspeckle/error.hpp"
#include "dynspeckle/stack_io.hpp"
#include "dynspeckle/version.hpp"

namespace dynspeckle::cli {
namespace {

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new(), EVP_MD_CTX_free) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) {
      throw Error("cannot initialise SHA-256");
    }
  }
  void update(const void* data, std::size_t size) { EVP_DigestUpdate(ctx_.get(), data, size); }
  std::string hex() {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx_.get(), md.data(), &len);
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
      out += kDigits[md[i] >> 4];
      out += kDigits[md[i] & 15];
    }
    return out;
  }

 private:
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

}  // namespace

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
  Sha256 h;
  h.update(bytes.data(), bytes.size());
  return h.hex();
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  Sha256 h;
  std::array<char, 1 << 16> buf;
  while (in) {
    in.read(buf.data(), buf.size());
    h.update(buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  return h.hex();
}

std::string stack_digest(const std::filesystem::path& input) {
  if (std::filesystem::is_directory(input)) return sha256_hex(serialize_stack(import_frame_dir(input)));
  return sha256_file(input);
}

nlohmann::json provenance_record(const std::string& command) {
  return {{"tool", "dynspeckle"}, {"version", kVersion}, {"command", command}};
}

void write_sidecar(const std::filesystem::path& output, const nlohmann::json& record) {
  const std::string text = record.dump(2) + "\n";
  std::filesystem::path path = output;
  path += ".json";
  write_file_atomic(path, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

}  // namespace dynspeckle::cli
