#pragma once

// Canonical fault catalog: closed label set, family grouping, and the
// incident / ground-truth records the benchmark passes around.

#include <optional>
#include <string>
#include <vector>

namespace netdiag {

enum class FaultFamily {
    link,
    mac_conflict,
    host_ip,
    acl,
    tc,
    ospf,
    bgp,
    dhcp,
    dns,
    load_balancer,
    resource_contention,
    host_crash,
};

enum class FaultLabel {
    link_detach,
    link_down,
    link_flap,
    mac_address_conflict,
    host_ip_conflict,
    host_wrong_ip,
    host_wrong_gateway,
    host_wrong_netmask,
    host_missing_ip,
    host_incorrect_dns,
    host_static_arp,
    arp_acl_block,
    icmp_acl_block,
    http_acl_block,
    dns_port_blocked,
    bgp_acl_block,
    ospf_acl_block,
    link_fragmentation_disabled,
    link_bandwidth_throttling,
    link_high_packet_corruption,
    incast_traffic_network_limitation,
    ospf_neighbor_missing,
    frr_service_down,
    ospf_area_misconfiguration,
    bgp_asn_misconfig,
    bgp_missing_route_advertisement,
    bgp_hijacking,
    bgp_blackhole_route_leak,
    host_static_blackhole,
    dhcp_service_down,
    dhcp_missing_subnet,
    dhcp_spoofed_subnet,
    dhcp_spoofed_dns,
    dns_service_down,
    dns_record_error,
    dns_lookup_latency,
    load_balancer_overload,
    sender_resource_contention,
    receiver_resource_contention,
    sender_application_delay,
    web_dos_attack,
    host_crash,
};

inline constexpr int kCatalogSize = 42;

const std::vector<FaultLabel>& all_labels();
const std::vector<FaultFamily>& all_families();

FaultFamily family_of(FaultLabel label);
const std::string& to_string(FaultLabel label);
const std::string& to_string(FaultFamily family);
std::optional<FaultLabel> label_from_string(const std::string& name);
std::optional<FaultFamily> family_from_string(const std::string& name);
std::vector<FaultLabel> labels_in_family(FaultFamily family);

// What the scorer holds; never shown to the diagnostic side.
struct GroundTruth {
    bool is_anomaly = false;
    std::vector<std::string> labels;   // sorted
    std::vector<std::string> devices;  // sorted
};

// What the benchmark hands to `diagnose`: enough to rebuild the world.
struct Incident {
    std::string incident_id;
    std::string scenario;
    std::string size;
    uint64_t seed = 0;
    std::optional<std::string> label;   // null for benign
    std::optional<std::string> target;  // device name or link id
};

}  // namespace netdiag
