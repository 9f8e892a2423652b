#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace appeco {

// SHA-256 (FIPS 180-4), enough for content digests in run manifests.
class Sha256 {
 public:
  Sha256();
  void update(const void* data, std::size_t len);
  std::string hex_digest();  // finalizes; call once

 private:
  void process_block(const std::uint8_t* block);
  std::uint32_t h_[8];
  std::uint8_t buf_[64];
  std::size_t buf_len_ = 0;
  std::uint64_t total_ = 0;
};

std::string sha256_hex(std::string_view data);
std::string sha256_file_hex(const std::string& path);  // throws on unreadable file

}  // namespace appeco
