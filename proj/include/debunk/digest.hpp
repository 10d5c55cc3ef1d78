#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace debunk {

using Sha256 = std::array<std::uint8_t, 32>;

Sha256 sha256(std::string_view data);

/// Lowercase hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

/// First eight bytes of the SHA-256 of `data`, big-endian.
std::uint64_t digest_u64(std::string_view data, std::size_t word = 0);

}  // namespace debunk
