#pragma once

#include <array>
#include <cstdint>

#include <openssl/evp.h>

#include "sdkex/bigint.hpp"
#include "sdkex/errors.hpp"
#include "sdkex/wire.hpp"

namespace sdkex {

using Key256 = std::array<std::uint8_t, 32>;

// SHA-256("SDKX" || platform-id || element-bytes). The platform id gives
// domain separation between platforms that could serialize to equal bytes.
inline Key256 kdf(wire::PlatformId platform, const Bytes& element_bytes) {
    Bytes input;
    input.reserve(5 + element_bytes.size());
    input.insert(input.end(), wire::kMagic.begin(), wire::kMagic.end());
    input.push_back(static_cast<std::uint8_t>(platform));
    input.insert(input.end(), element_bytes.begin(), element_bytes.end());
    Key256 out{};
    unsigned int len = 0;
    if (EVP_Digest(input.data(), input.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 ||
        len != out.size())
        throw Error("kdf: digest failure");
    return out;
}

inline std::string hex(const std::uint8_t* data, std::size_t len) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string s;
    s.reserve(len * 2);
    for (std::size_t i = 0; i < len; ++i) {
        s.push_back(kDigits[data[i] >> 4]);
        s.push_back(kDigits[data[i] & 0xf]);
    }
    return s;
}

inline std::string hex(const Bytes& b) { return hex(b.data(), b.size()); }
inline std::string hex(const Key256& k) { return hex(k.data(), k.size()); }

inline Bytes from_hex(const std::string& s) {
    if (s.size() % 2 != 0) throw ParamError("hex string has odd length");
    auto nib = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        throw ParamError("invalid hex digit");
    };
    Bytes out(s.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = static_cast<std::uint8_t>((nib(s[2 * i]) << 4) | nib(s[2 * i + 1]));
    return out;
}

} // namespace sdkex
