#pragma once

// IPv4 address / prefix helpers used across the model.

#include <cstdint>
#include <optional>
#include <string>

namespace netdiag {

struct Ipv4 {
    uint32_t v = 0;

    constexpr Ipv4() = default;
    constexpr explicit Ipv4(uint32_t raw) : v(raw) {}
    constexpr Ipv4(int a, int b, int c, int d)
        : v((uint32_t(a) << 24) | (uint32_t(b) << 16) | (uint32_t(c) << 8) | uint32_t(d)) {}

    constexpr bool operator==(const Ipv4& o) const { return v == o.v; }
    constexpr bool operator!=(const Ipv4& o) const { return v != o.v; }
    constexpr bool operator<(const Ipv4& o) const { return v < o.v; }

    std::string str() const;

    // Strict dotted-quad parse; rejects anything a resolv.conf would choke on.
    static std::optional<Ipv4> parse(const std::string& s);
};

struct Prefix {
    Ipv4 addr;
    int len = 0;

    constexpr bool operator==(const Prefix& o) const { return addr == o.addr && len == o.len; }
    constexpr bool operator<(const Prefix& o) const {
        return addr.v != o.addr.v ? addr.v < o.addr.v : len < o.len;
    }

    constexpr uint32_t mask() const {
        return len == 0 ? 0u : (len >= 32 ? 0xffffffffu : ~((1u << (32 - len)) - 1));
    }
    constexpr bool contains(Ipv4 ip) const { return (ip.v & mask()) == (addr.v & mask()); }
    constexpr Prefix network() const { return {Ipv4(addr.v & mask()), len}; }

    std::string str() const;
    static std::optional<Prefix> parse(const std::string& s);
};

}  // namespace netdiag
