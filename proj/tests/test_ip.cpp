#include <doctest.h>

#include "netdiag/ip.hpp"

using namespace netdiag;

// Expected values below were computed by hand from the dotted-quad layout
// (a<<24 | b<<16 | c<<8 | d) and standard mask arithmetic.

TEST_CASE("ipv4 construction and formatting") {
    CHECK(Ipv4(10, 0, 0, 1).v == 0x0a000001u);
    CHECK(Ipv4(192, 168, 1, 254).v == 0xc0a801feu);
    CHECK(Ipv4(0xffffffffu).str() == "255.255.255.255");
    CHECK(Ipv4(10, 20, 30, 40).str() == "10.20.30.40");
    CHECK(Ipv4().str() == "0.0.0.0");
}

TEST_CASE("ipv4 parse accepts exactly dotted quads") {
    CHECK(Ipv4::parse("10.0.0.1") == Ipv4(10, 0, 0, 1));
    CHECK(Ipv4::parse("255.255.255.255") == Ipv4(0xffffffffu));
    CHECK(Ipv4::parse("0.0.0.0") == Ipv4(0u));

    CHECK_FALSE(Ipv4::parse(""));
    CHECK_FALSE(Ipv4::parse("10.0.0"));
    CHECK_FALSE(Ipv4::parse("10.0.0.0.1"));
    CHECK_FALSE(Ipv4::parse("10.0.0.256"));
    CHECK_FALSE(Ipv4::parse("10.0.0.-1"));
    CHECK_FALSE(Ipv4::parse("10.0.0.1 "));
    CHECK_FALSE(Ipv4::parse("a.b.c.d"));
    CHECK_FALSE(Ipv4::parse("dns.corp.invalid"));
}

TEST_CASE("ordering is numeric") {
    CHECK(Ipv4(10, 0, 0, 9) < Ipv4(10, 0, 0, 10));
    CHECK(Ipv4(9, 255, 255, 255) < Ipv4(10, 0, 0, 0));
    CHECK_FALSE(Ipv4(10, 0, 1, 0) < Ipv4(10, 0, 0, 255));
}

TEST_CASE("prefix mask and network") {
    // /24 mask is 255.255.255.0 = 0xffffff00.
    CHECK(Prefix{Ipv4(10, 1, 2, 3), 24}.mask() == 0xffffff00u);
    CHECK(Prefix{Ipv4(10, 1, 2, 3), 24}.network() == Prefix{Ipv4(10, 1, 2, 0), 24});
    // /30 keeps the top 30 bits: 10.0.0.5/30 -> 10.0.0.4/30.
    CHECK(Prefix{Ipv4(10, 0, 0, 5), 30}.network() == Prefix{Ipv4(10, 0, 0, 4), 30});
    CHECK(Prefix{Ipv4(1, 2, 3, 4), 0}.mask() == 0u);
    CHECK(Prefix{Ipv4(1, 2, 3, 4), 32}.mask() == 0xffffffffu);
    // /25 splits the last octet at 128: .127 inside, .128 outside.
    Prefix half{Ipv4(172, 16, 5, 0), 25};
    CHECK(half.contains(Ipv4(172, 16, 5, 127)));
    CHECK_FALSE(half.contains(Ipv4(172, 16, 5, 128)));
}

TEST_CASE("prefix containment at boundaries") {
    Prefix net{Ipv4(192, 168, 10, 0), 24};
    CHECK(net.contains(Ipv4(192, 168, 10, 0)));
    CHECK(net.contains(Ipv4(192, 168, 10, 255)));
    CHECK_FALSE(net.contains(Ipv4(192, 168, 11, 0)));
    CHECK_FALSE(net.contains(Ipv4(192, 168, 9, 255)));
    CHECK(Prefix{Ipv4(0, 0, 0, 0), 0}.contains(Ipv4(203, 0, 113, 7)));
}

TEST_CASE("prefix parse and formatting round-trip") {
    auto p = Prefix::parse("10.0.0.0/8");
    REQUIRE(p);
    CHECK(p->addr == Ipv4(10, 0, 0, 0));
    CHECK(p->len == 8);
    CHECK(p->str() == "10.0.0.0/8");

    CHECK_FALSE(Prefix::parse("10.0.0.0"));
    CHECK_FALSE(Prefix::parse("10.0.0.0/33"));
    CHECK_FALSE(Prefix::parse("10.0.0.0/-1"));
    CHECK_FALSE(Prefix::parse("10.0.0.0/"));
    CHECK_FALSE(Prefix::parse("/24"));
}
