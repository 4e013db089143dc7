#include "netdiag/model.hpp"

#include <algorithm>

namespace netdiag {

AclChain* AclRuleset::chain(const std::string& name) {
    for (auto& c : chains)
        if (c.name == name) return &c;
    return nullptr;
}

const AclChain* AclRuleset::chain(const std::string& name) const {
    for (auto& c : chains)
        if (c.name == name) return &c;
    return nullptr;
}

Interface* Device::iface(const std::string& n) {
    for (auto& i : interfaces)
        if (i.name == n) return &i;
    return nullptr;
}

const Interface* Device::iface(const std::string& n) const {
    for (auto& i : interfaces)
        if (i.name == n) return &i;
    return nullptr;
}

const Interface* Device::primary_iface() const {
    for (auto& i : interfaces)
        if (i.addr) return &i;
    return interfaces.empty() ? nullptr : &interfaces.front();
}

Interface* Device::primary_iface() {
    for (auto& i : interfaces)
        if (i.addr) return &i;
    return interfaces.empty() ? nullptr : &interfaces.front();
}

bool Device::owns_ip(Ipv4 ip) const {
    for (auto& i : interfaces)
        if (i.addr && *i.addr == ip) return true;
    return false;
}

std::string Link::make_id(const LinkEnd& x, const LinkEnd& y) {
    auto one = x.device + "/" + x.iface;
    auto two = y.device + "/" + y.iface;
    if (two < one) std::swap(one, two);
    return one + "--" + two;
}

const Device* Topology::device(const std::string& name) const {
    auto it = devices.find(name);
    return it == devices.end() ? nullptr : &it->second;
}

Device* Topology::device(const std::string& name) {
    auto it = devices.find(name);
    return it == devices.end() ? nullptr : &it->second;
}

const Link* Topology::link_of(const std::string& device, const std::string& iface) const {
    for (auto& l : links) {
        if ((l.a.device == device && l.a.iface == iface) ||
            (l.b.device == device && l.b.iface == iface))
            return &l;
    }
    return nullptr;
}

Link* Topology::link_of(const std::string& device, const std::string& iface) {
    return const_cast<Link*>(static_cast<const Topology*>(this)->link_of(device, iface));
}

const Link* Topology::link_by_id(const std::string& id) const {
    for (auto& l : links)
        if (l.id == id) return &l;
    return nullptr;
}

Link* Topology::link_by_id(const std::string& id) {
    return const_cast<Link*>(static_cast<const Topology*>(this)->link_by_id(id));
}

const Device* Topology::owner_of(Ipv4 ip) const {
    for (auto& [name, d] : devices)
        if (d.owns_ip(ip)) return &d;
    return nullptr;
}

std::vector<std::string> Topology::host_names() const {
    std::vector<std::string> out;
    for (auto& [name, d] : devices)
        if (d.kind == DeviceKind::host) out.push_back(name);
    return out;  // map iteration is already sorted
}

bool link_passes(const Link& l, int tick) {
    switch (l.state) {
        case LinkState::up: return true;
        case LinkState::flapping: return (tick / kFlapPeriodTicks) % 2 == 0;
        default: return false;
    }
}

bool iface_oper_up(const Topology& t, const Device& d, const Interface& i, int tick) {
    if (!i.admin_up || !i.oper_up || d.crashed) return false;
    if (const Link* l = t.link_of(d.name, i.name)) {
        if (l->state == LinkState::detached || l->state == LinkState::down) return false;
        if (l->state == LinkState::flapping) return link_passes(*l, tick);
    }
    return true;
}

bool iface_carrier(const Topology& t, const Device& d, const Interface& i) {
    if (const Link* l = t.link_of(d.name, i.name))
        if (l->state == LinkState::detached) return false;
    return true;
}

int iface_carrier_transitions(const Topology& t, const Device& d, const Interface& i, int tick) {
    (void)d;
    if (const Link* l = t.link_of(d.name, i.name))
        if (l->state == LinkState::flapping) return 1 + tick / kFlapPeriodTicks;
    (void)i;
    return 1;
}

}  // namespace netdiag
