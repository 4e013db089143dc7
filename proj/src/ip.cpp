#include "netdiag/ip.hpp"

#include <cstdio>

namespace netdiag {

std::string Ipv4::str() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%u.%u.%u.%u", (v >> 24) & 0xff, (v >> 16) & 0xff,
                  (v >> 8) & 0xff, v & 0xff);
    return buf;
}

std::optional<Ipv4> Ipv4::parse(const std::string& s) {
    unsigned a, b, c, d;
    char tail;
    if (std::sscanf(s.c_str(), "%u.%u.%u.%u%c", &a, &b, &c, &d, &tail) != 4) return std::nullopt;
    if (a > 255 || b > 255 || c > 255 || d > 255) return std::nullopt;
    return Ipv4(int(a), int(b), int(c), int(d));
}

std::string Prefix::str() const { return addr.str() + "/" + std::to_string(len); }

std::optional<Prefix> Prefix::parse(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) return std::nullopt;
    auto ip = Ipv4::parse(s.substr(0, slash));
    if (!ip) return std::nullopt;
    int len = 0;
    try {
        len = std::stoi(s.substr(slash + 1));
    } catch (...) {
        return std::nullopt;
    }
    if (len < 0 || len > 32) return std::nullopt;
    return Prefix{*ip, len};
}

}  // namespace netdiag
