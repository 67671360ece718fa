#pragma once

#include <array>
#include <cstdint>
#include <cstring>

#include "sdkex/bigint.hpp"
#include "sdkex/errors.hpp"

namespace sdkex::wire {

inline constexpr std::array<std::uint8_t, 4> kMagic = {'S', 'D', 'K', 'X'};
inline constexpr std::uint8_t kVersion = 1;
inline constexpr std::size_t kHeaderSize = 11; // magic + version + platform + role + length

enum class PlatformId : std::uint8_t {
    ModP = 1,
    MatrixGroupRing = 2,
    Nilpotent = 3,
};

enum class Role : std::uint8_t {
    Initiator = 0,
    Responder = 1,
};

// One transmission: exactly one platform element, never an endomorphism
// power.
struct Message {
    PlatformId platform;
    Role role;
    Bytes payload;

    bool operator==(const Message&) const = default;
};

inline Bytes encode(const Message& m) {
    Bytes out;
    out.reserve(kHeaderSize + m.payload.size());
    out.insert(out.end(), kMagic.begin(), kMagic.end());
    out.push_back(kVersion);
    out.push_back(static_cast<std::uint8_t>(m.platform));
    out.push_back(static_cast<std::uint8_t>(m.role));
    const std::uint32_t len = static_cast<std::uint32_t>(m.payload.size());
    out.push_back(static_cast<std::uint8_t>(len >> 24));
    out.push_back(static_cast<std::uint8_t>(len >> 16));
    out.push_back(static_cast<std::uint8_t>(len >> 8));
    out.push_back(static_cast<std::uint8_t>(len));
    out.insert(out.end(), m.payload.begin(), m.payload.end());
    return out;
}

inline Message decode(const Bytes& b) {
    if (b.size() < kHeaderSize) throw WireError("message truncated");
    if (std::memcmp(b.data(), kMagic.data(), 4) != 0) throw WireError("bad magic");
    if (b[4] != kVersion) throw WireError("unknown version");
    const std::uint8_t pid = b[5];
    if (pid < 1 || pid > 3) throw WireError("unknown platform id");
    if (b[6] > 1) throw WireError("bad role byte");
    const std::uint32_t len = (std::uint32_t(b[7]) << 24) | (std::uint32_t(b[8]) << 16) |
                              (std::uint32_t(b[9]) << 8) | std::uint32_t(b[10]);
    if (b.size() != kHeaderSize + len) throw WireError("payload length mismatch");
    Message m;
    m.platform = static_cast<PlatformId>(pid);
    m.role = static_cast<Role>(b[6]);
    m.payload.assign(b.begin() + kHeaderSize, b.end());
    return m;
}

} // namespace sdkex::wire
