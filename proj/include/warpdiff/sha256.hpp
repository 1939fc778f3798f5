#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace warpdiff {

/// Incremental SHA-256. Output digests are lowercase hex, so expected stdout
/// digests in a manifest can be produced with standard tooling (sha256sum).
class Sha256 {
public:
  Sha256();

  void update(const void* data, std::size_t len);
  void update(std::string_view data) { update(data.data(), data.size()); }

  /// Finalizes and returns the 64-char hex digest. The object must not be
  /// updated afterwards.
  std::string hex_digest();

private:
  void process_block(const std::uint8_t* block);

  std::array<std::uint32_t, 8> state_;
  std::array<std::uint8_t, 64> buffer_;
  std::uint64_t total_len_ = 0;
  std::size_t buffer_len_ = 0;
};

std::string sha256_hex(std::string_view data);

}  // namespace warpdiff
