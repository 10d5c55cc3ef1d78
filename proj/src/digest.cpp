#include "debunk/digest.hpp"

#include <openssl/evp.h>

#include <stdexcept>

namespace debunk {

Sha256 sha256(std::string_view data) {
    Sha256 out{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 ||
        len != out.size()) {
        throw std::runtime_error("sha256: EVP_Digest failed");
    }
    return out;
}

std::string sha256_hex(std::string_view data) {
    static constexpr char kHex[] = "0123456789abcdef";
    const auto d = sha256(data);
    std::string hex;
    hex.reserve(d.size() * 2);
    for (auto b : d) {
        hex.push_back(kHex[b >> 4]);
        hex.push_back(kHex[b & 0x0f]);
    }
    return hex;
}

std::uint64_t digest_u64(std::string_view data, std::size_t word) {
    if (word >= 4) throw std::out_of_range("digest_u64: word index must be < 4");
    const auto d = sha256(data);
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < 8; ++i) v = (v << 8) | d[word * 8 + i];
    return v;
}

}  // namespace debunk
