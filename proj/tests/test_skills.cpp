#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "netdiag/skills.hpp"

using namespace netdiag;

TEST_CASE("builtin skill set loads and owns the whole catalog") {
    SkillSet s = load_builtin_skills();
    CHECK(s.skills.size() == 15);  // 12 family skills + 3 utility

    int utility = 0;
    for (const auto& [id, sk] : s.skills) {
        if (sk.is_utility()) {
            ++utility;
            CHECK(sk.fingerprints.empty());
        }
        CHECK(sk.stop == "first-full-match");
        CHECK(sk.escalate == "return-to-index");
    }
    CHECK(utility == 3);

    CHECK(s.owner.size() == kCatalogSize);
    for (FaultLabel l : all_labels()) {
        CAPTURE(to_string(l));
        REQUIRE(s.owner.count(l));
        CHECK(s.by_id(s.owner.at(l)) != nullptr);
        CHECK(s.fingerprint_for(l) != nullptr);  // delegations resolve too
    }
}

TEST_CASE("ownership split matches the designed division of labor") {
    SkillSet s = load_builtin_skills();
    std::map<std::string, int> owned;
    for (const auto& [label, skill] : s.owner) ++owned[skill];

    CHECK(owned.at("link") == 3);
    CHECK(owned.at("mac_conflict") == 1);
    CHECK(owned.at("host_ip") == 7);
    CHECK(owned.at("acl") == 7);
    CHECK(owned.at("tc") == 3);
    CHECK(owned.at("ospf") == 3);
    CHECK(owned.at("bgp") == 5);
    CHECK(owned.at("dhcp") == 4);
    CHECK(owned.at("dns") == 3);
    CHECK(owned.at("load_balancer") == 1);
    CHECK(owned.at("resource_contention") == 4);
    CHECK(owned.at("host_crash") == 1);

    // cross-family placements settle where the evidence lives
    CHECK(s.owner.at(*label_from_string("dns_port_blocked")) == "acl");
    CHECK(s.owner.at(*label_from_string("frr_service_down")) == "ospf");
    CHECK(s.owner.at(*label_from_string("host_static_blackhole")) == "bgp");
}

TEST_CASE("delegates point at the actual owner") {
    SkillSet s = load_builtin_skills();
    const Skill* dns = s.by_id("dns");
    REQUIRE(dns);
    bool delegates_port_block = false;
    for (const auto& d : dns->delegates)
        if (to_string(d.label) == "dns_port_blocked" && d.owner_skill == "acl")
            delegates_port_block = true;
    CHECK(delegates_port_block);

    const Skill* bgp = s.by_id("bgp");
    REQUIRE(bgp);
    bool delegates_frr = false;
    for (const auto& d : bgp->delegates)
        if (to_string(d.label) == "frr_service_down" && d.owner_skill == "ospf")
            delegates_frr = true;
    CHECK(delegates_frr);
}

TEST_CASE("every fingerprint atom is backed by its probe plan") {
    SkillSet s = load_builtin_skills();
    const auto& reqs = atom_requirements();
    for (const auto& [id, sk] : s.skills)
        for (const auto& fp : sk.fingerprints)
            for (const auto& [atom, neg] : fp.atoms) {
                REQUIRE(reqs.count(atom));
                for (ProbeKind need : reqs.at(atom)) {
                    bool planned = false;
                    for (const auto& [kind, param] : fp.plan)
                        if (kind == need) planned = true;
                    CAPTURE(id);
                    CAPTURE(atom);
                    CHECK(planned);
                }
            }
}

TEST_CASE("the parser rejects malformed files fast") {
    auto bad = [](const std::string& name, const std::string& text) {
        CHECK_THROWS_AS(parse_skill(name, text), SkillError);
    };

    bad("link", "skill wrong_id\nfamily link\nstop first-full-match\n");  // id != filename
    bad("link", "skill link\nfamily not_a_family\n");
    bad("link", "skill link\nfamily link\nfingerprint link_down\nend\n");  // no localize
    bad("link",
        "skill link\nfamily link\nfingerprint link_down\nprobe iface_addr\n"
        "match no_such_atom\nlocalize matched\nend\n");
    bad("link",
        "skill link\nfamily link\nfingerprint link_down\n"
        "match iface_down_carrier\nlocalize matched\nend\n");  // atom without backing probe
    bad("util", "skill util\nfamily utility\nfingerprint link_down\nprobe iface_addr\n"
                "match iface_down_carrier\nlocalize matched\nend\n");  // utility with fingerprint
}

TEST_CASE("the set validator enforces exactly-once ownership") {
    auto files = builtin_skill_files();

    SUBCASE("dropping a file leaves labels unowned") {
        files.erase("host_crash");
        CHECK_THROWS_AS(parse_skill_set(files), SkillError);
    }
    SUBCASE("claiming a label twice is rejected") {
        files["host_crash"] +=
            "\nfingerprint link_down\nprobe iface_addr\nmatch iface_down_carrier\n"
            "localize matched\nend\n";
        CHECK_THROWS_AS(parse_skill_set(files), SkillError);
    }
    SUBCASE("dangling delegate is rejected") {
        files["host_crash"] += "\ndelegate web_dos_attack no_such_skill\n";
        CHECK_THROWS_AS(parse_skill_set(files), SkillError);
    }
}

TEST_CASE("directory loading matches the embedded set") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "netdiag_skills_rt";
    fs::remove_all(dir);
    fs::create_directories(dir);
    for (const auto& [name, text] : builtin_skill_files()) {
        std::ofstream out(dir / (name + ".skill"));
        out << text;
    }
    SkillSet from_dir = load_skills_from_dir(dir.string());
    SkillSet builtin = load_builtin_skills();
    CHECK(from_dir.skills.size() == builtin.skills.size());
    CHECK(from_dir.owner == builtin.owner);
    fs::remove_all(dir);
}

TEST_CASE("comments and blank lines are ignored") {
    Skill sk = parse_skill("host_crash",
                           "# top comment\n\nskill host_crash\nfamily host_crash\n"
                           "signals\n  # inner\n  unresponsive endpoint\nend\n"
                           "fingerprint host_crash\nprobe process_list\nmatch unresponsive\n"
                           "localize matched\nend\n");
    CHECK(sk.id == "host_crash");
    CHECK(sk.signals.size() == 1);
    REQUIRE(sk.fingerprints.size() == 1);
    CHECK(sk.fingerprints[0].atoms.size() == 1);
}
