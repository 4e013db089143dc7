#include <doctest.h>

#include <set>

#include "netdiag/fault.hpp"

using namespace netdiag;

TEST_CASE("catalog has exactly the advertised labels") {
    CHECK(all_labels().size() == kCatalogSize);
    CHECK(kCatalogSize == 42);

    std::set<std::string> names;
    for (FaultLabel l : all_labels()) names.insert(to_string(l));
    CHECK(names.size() == kCatalogSize);  // no duplicate strings

    // spot anchors across families
    CHECK(names.count("link_flap"));
    CHECK(names.count("mac_address_conflict"));
    CHECK(names.count("bgp_hijacking"));
    CHECK(names.count("dhcp_spoofed_dns"));
    CHECK(names.count("web_dos_attack"));
    CHECK(names.count("host_crash"));
}

TEST_CASE("every label belongs to exactly one of the twelve families") {
    CHECK(all_families().size() == 12);
    std::set<FaultFamily> seen;
    size_t total = 0;
    for (FaultFamily f : all_families()) {
        seen.insert(f);
        for (FaultLabel l : labels_in_family(f)) {
            CHECK(family_of(l) == f);
            ++total;
        }
    }
    CHECK(seen.size() == 12);
    CHECK(total == kCatalogSize);  // the families partition the catalog
}

TEST_CASE("family membership oracles") {
    auto fam = [](const char* l) { return family_of(*label_from_string(l)); };
    CHECK(fam("link_down") == fam("link_flap"));
    CHECK(fam("dns_port_blocked") == fam("icmp_acl_block"));  // port block is an ACL fault
    CHECK(fam("frr_service_down") == fam("ospf_neighbor_missing"));
    CHECK(fam("host_static_blackhole") == fam("bgp_hijacking"));
    CHECK(fam("link_bandwidth_throttling") != fam("link_down"));  // queueing, not link state
    CHECK(to_string(fam("host_ip_conflict")) == "host_ip");
    CHECK(to_string(fam("sender_resource_contention")) == "resource_contention");
}

TEST_CASE("string round-trips") {
    for (FaultLabel l : all_labels()) {
        auto back = label_from_string(to_string(l));
        REQUIRE(back);
        CHECK(*back == l);
    }
    for (FaultFamily f : all_families()) {
        auto back = family_from_string(to_string(f));
        REQUIRE(back);
        CHECK(*back == f);
    }
    CHECK_FALSE(label_from_string("definitely_not_a_fault"));
    CHECK_FALSE(family_from_string(""));
}
