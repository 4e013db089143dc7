#include "netdiag/fault.hpp"

#include <array>
#include <map>

namespace netdiag {
namespace {

struct LabelInfo {
    FaultLabel label;
    FaultFamily family;
    const char* name;
};

// One row per catalog label, grouped by owning family. dns_port_blocked sits
// in the acl family; the dns skill cross-references it.
constexpr std::array<LabelInfo, kCatalogSize> kCatalog{{
    {FaultLabel::link_detach, FaultFamily::link, "link_detach"},
    {FaultLabel::link_down, FaultFamily::link, "link_down"},
    {FaultLabel::link_flap, FaultFamily::link, "link_flap"},
    {FaultLabel::mac_address_conflict, FaultFamily::mac_conflict, "mac_address_conflict"},
    {FaultLabel::host_ip_conflict, FaultFamily::host_ip, "host_ip_conflict"},
    {FaultLabel::host_wrong_ip, FaultFamily::host_ip, "host_wrong_ip"},
    {FaultLabel::host_wrong_gateway, FaultFamily::host_ip, "host_wrong_gateway"},
    {FaultLabel::host_wrong_netmask, FaultFamily::host_ip, "host_wrong_netmask"},
    {FaultLabel::host_missing_ip, FaultFamily::host_ip, "host_missing_ip"},
    {FaultLabel::host_incorrect_dns, FaultFamily::host_ip, "host_incorrect_dns"},
    {FaultLabel::host_static_arp, FaultFamily::host_ip, "host_static_arp"},
    {FaultLabel::arp_acl_block, FaultFamily::acl, "arp_acl_block"},
    {FaultLabel::icmp_acl_block, FaultFamily::acl, "icmp_acl_block"},
    {FaultLabel::http_acl_block, FaultFamily::acl, "http_acl_block"},
    {FaultLabel::dns_port_blocked, FaultFamily::acl, "dns_port_blocked"},
    {FaultLabel::bgp_acl_block, FaultFamily::acl, "bgp_acl_block"},
    {FaultLabel::ospf_acl_block, FaultFamily::acl, "ospf_acl_block"},
    {FaultLabel::link_fragmentation_disabled, FaultFamily::acl, "link_fragmentation_disabled"},
    {FaultLabel::link_bandwidth_throttling, FaultFamily::tc, "link_bandwidth_throttling"},
    {FaultLabel::link_high_packet_corruption, FaultFamily::tc, "link_high_packet_corruption"},
    {FaultLabel::incast_traffic_network_limitation, FaultFamily::tc,
     "incast_traffic_network_limitation"},
    {FaultLabel::ospf_neighbor_missing, FaultFamily::ospf, "ospf_neighbor_missing"},
    {FaultLabel::frr_service_down, FaultFamily::ospf, "frr_service_down"},
    {FaultLabel::ospf_area_misconfiguration, FaultFamily::ospf, "ospf_area_misconfiguration"},
    {FaultLabel::bgp_asn_misconfig, FaultFamily::bgp, "bgp_asn_misconfig"},
    {FaultLabel::bgp_missing_route_advertisement, FaultFamily::bgp,
     "bgp_missing_route_advertisement"},
    {FaultLabel::bgp_hijacking, FaultFamily::bgp, "bgp_hijacking"},
    {FaultLabel::bgp_blackhole_route_leak, FaultFamily::bgp, "bgp_blackhole_route_leak"},
    {FaultLabel::host_static_blackhole, FaultFamily::bgp, "host_static_blackhole"},
    {FaultLabel::dhcp_service_down, FaultFamily::dhcp, "dhcp_service_down"},
    {FaultLabel::dhcp_missing_subnet, FaultFamily::dhcp, "dhcp_missing_subnet"},
    {FaultLabel::dhcp_spoofed_subnet, FaultFamily::dhcp, "dhcp_spoofed_subnet"},
    {FaultLabel::dhcp_spoofed_dns, FaultFamily::dhcp, "dhcp_spoofed_dns"},
    {FaultLabel::dns_service_down, FaultFamily::dns, "dns_service_down"},
    {FaultLabel::dns_record_error, FaultFamily::dns, "dns_record_error"},
    {FaultLabel::dns_lookup_latency, FaultFamily::dns, "dns_lookup_latency"},
    {FaultLabel::load_balancer_overload, FaultFamily::load_balancer, "load_balancer_overload"},
    {FaultLabel::sender_resource_contention, FaultFamily::resource_contention,
     "sender_resource_contention"},
    {FaultLabel::receiver_resource_contention, FaultFamily::resource_contention,
     "receiver_resource_contention"},
    {FaultLabel::sender_application_delay, FaultFamily::resource_contention,
     "sender_application_delay"},
    {FaultLabel::web_dos_attack, FaultFamily::resource_contention, "web_dos_attack"},
    {FaultLabel::host_crash, FaultFamily::host_crash, "host_crash"},
}};

const char* family_name(FaultFamily f) {
    switch (f) {
        case FaultFamily::link: return "link";
        case FaultFamily::mac_conflict: return "mac_conflict";
        case FaultFamily::host_ip: return "host_ip";
        case FaultFamily::acl: return "acl";
        case FaultFamily::tc: return "tc";
        case FaultFamily::ospf: return "ospf";
        case FaultFamily::bgp: return "bgp";
        case FaultFamily::dhcp: return "dhcp";
        case FaultFamily::dns: return "dns";
        case FaultFamily::load_balancer: return "load_balancer";
        case FaultFamily::resource_contention: return "resource_contention";
        case FaultFamily::host_crash: return "host_crash";
    }
    return "?";
}

}  // namespace

const std::vector<FaultLabel>& all_labels() {
    static const std::vector<FaultLabel> v = [] {
        std::vector<FaultLabel> out;
        for (auto& e : kCatalog) out.push_back(e.label);
        return out;
    }();
    return v;
}

const std::vector<FaultFamily>& all_families() {
    static const std::vector<FaultFamily> v = {
        FaultFamily::link,          FaultFamily::mac_conflict,
        FaultFamily::host_ip,       FaultFamily::acl,
        FaultFamily::tc,            FaultFamily::ospf,
        FaultFamily::bgp,           FaultFamily::dhcp,
        FaultFamily::dns,           FaultFamily::load_balancer,
        FaultFamily::resource_contention, FaultFamily::host_crash,
    };
    return v;
}

FaultFamily family_of(FaultLabel label) {
    for (auto& e : kCatalog)
        if (e.label == label) return e.family;
    return FaultFamily::link;  // unreachable: closed enum
}

const std::string& to_string(FaultLabel label) {
    static const std::map<FaultLabel, std::string> names = [] {
        std::map<FaultLabel, std::string> m;
        for (auto& e : kCatalog) m[e.label] = e.name;
        return m;
    }();
    return names.at(label);
}

const std::string& to_string(FaultFamily family) {
    static const std::map<FaultFamily, std::string> names = [] {
        std::map<FaultFamily, std::string> m;
        for (auto f : all_families()) m[f] = family_name(f);
        return m;
    }();
    return names.at(family);
}

std::optional<FaultLabel> label_from_string(const std::string& name) {
    for (auto& e : kCatalog)
        if (name == e.name) return e.label;
    return std::nullopt;
}

std::optional<FaultFamily> family_from_string(const std::string& name) {
    for (auto f : all_families())
        if (to_string(f) == name) return f;
    return std::nullopt;
}

std::vector<FaultLabel> labels_in_family(FaultFamily family) {
    std::vector<FaultLabel> out;
    for (auto& e : kCatalog)
        if (e.family == family) out.push_back(e.label);
    return out;
}

}  // namespace netdiag
