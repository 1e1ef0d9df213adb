#include <random>
#include <set>

#include "doctest.h"
#include "ppf/convert.hpp"
#include "ppf/fixtures.hpp"
#include "ppf/large.hpp"
#include "ppf/protocol.hpp"
#include "ppf/verify.hpp"

using namespace ppf;

namespace {

Multiset named(const Protocol& p, std::vector<std::string> names) {
    std::vector<Sid> ids;
    for (const auto& n : names) ids.push_back(p.at(n));
    return ms_of(ids);
}

const Transition& by_label(const Protocol& p, const std::string& label) {
    for (const auto& t : p.transitions)
        if (t.label == label) return t;
    throw std::out_of_range(label);
}

std::set<Config> successor_set(const Protocol& p, const Config& c) {
    std::set<Config> r;
    for (const auto& [i, d] : successors(p, c)) r.insert(d);
    return r;
}

Expectation at_least(std::int64_t k) {
    return [k](const Valuation& v) { return v.count("x") && v.at("x") >= k ? 1 : 0; };
}

int verdict_mismatches(const Protocol& p, std::int64_t k, int max_size) {
    auto r = check_computes([&] { return std::make_shared<ExplicitMachine>(p); }, at_least(k),
                            inputs_between(p.vars, 2, max_size));
    return static_cast<int>(r.fail + r.inconclusive);
}

}  // namespace

TEST_CASE("initial configurations") {
    Protocol pp = fixture_ppn(3);
    CHECK(initial_config(pp, {{"x", 3}}) == named(pp, {"1", "1", "1"}));

    RDIProtocol rdi = build_threshold_rdi({{"x", 1}}, 2, {"x"});
    CHECK(initial_config(rdi.base, {}) == named(rdi.base, {"0", "0", "0", "0", "f"}));
    CHECK(initial_config(rdi.base, {}) == rdi.base.leaders);

    CHECK_THROWS_AS(initial_config(pp, {{"x", 1}}), std::invalid_argument);
    CHECK_THROWS_AS(initial_config(pp, {{"y", 2}}), std::invalid_argument);
}

TEST_CASE("fire and enabled") {
    Protocol pp = fixture_ppn(2);
    Config c = named(pp, {"1", "1"});
    const Transition& up = by_label(pp, "up_0");
    REQUIRE(enabled(c, up));
    CHECK(fire(c, up) == named(pp, {"0", "2"}));
    CHECK_FALSE(enabled(named(pp, {"1", "2"}), up));

    RDIProtocol rdi = build_threshold_rdi({{"x", 1}}, 2, {"x"});
    Config d = named(rdi.base, {"x", "0"});
    const Transition& add = by_label(rdi.base, "add_x");
    REQUIRE(enabled(d, add));
    CHECK(fire(d, add) == named(rdi.base, {"0_x", "+1"}));
}

TEST_CASE("fire then unfire restores the configuration") {
    std::mt19937_64 rng(1);
    RDIProtocol rdi = build_threshold_rdi({{"x", 2}, {"y", -1}}, 3, {"x", "y"});
    Protocol p = rdi.with_dagger();
    Config c = initial_config(p, {{"x", 3}, {"y", 2}});
    const std::size_t size = ms_size(c);
    for (int step = 0; step < 500; ++step) {
        auto succ = successors(p, c);
        if (succ.empty()) break;
        auto [i, d] = succ[std::uniform_int_distribution<std::size_t>(0, succ.size() - 1)(rng)];
        const Transition& t = p.transitions[i];
        CHECK(enabled(c, t) == ms_leq(t.pre, c));
        CHECK(ms_size(d) == size);
        CHECK(ms_add(ms_sub(d, t.post), t.pre) == c);
        c = d;
    }
}

TEST_CASE("successors") {
    Protocol pp = fixture_ppn(1);
    CHECK(successor_set(pp, named(pp, {"1", "1"})) == std::set<Config>{named(pp, {"0", "2"})});
    Protocol p1 = fixture_pn(1);
    CHECK(successor_set(p1, named(p1, {"1", "1"})) == std::set<Config>{named(p1, {"2", "2"})});
    CHECK(successor_set(pp, named(pp, {"0", "1"})).empty());
}

TEST_CASE("output of configurations") {
    Protocol pp = fixture_ppn(1);
    CHECK(output_of(pp.outputs, named(pp, {"2", "2"})) == 1);
    CHECK(output_of(pp.outputs, named(pp, {"0", "2"})) == kBottom);
    RDIProtocol rdi = build_threshold_rdi({{"x", 1}}, 2, {"x"});
    const auto& o = rdi.base.outputs;
    CHECK(output_of(o, named(rdi.base, {"f", "t"})) == kBottom);
    CHECK(output_of(o, named(rdi.base, {"0", "+1"})) == kBottom);
    CHECK(output_of(o, named(rdi.base, {"0", "t"})) == 1);
}

TEST_CASE("validate") {
    CHECK(validate(fixture_ppn(3)).empty());
    CHECK(validate(fixture_pn(2)).empty());

    Protocol bad = fixture_ppn(1);
    bad.transitions.push_back(Transition{named(bad, {"1", "1"}), named(bad, {"2"}), "shrink"});
    auto v = validate(bad);
    REQUIRE(v.size() == 1);
    CHECK(v[0].find("width mismatch") != std::string::npos);

    Protocol simple;
    simple.flavor = Flavor::Simple;
    simple.add_state("f", 0);
    simple.add_state("t", 1);
    simple.add_state("t2", 1);
    simple.add_var("x", 0);
    CHECK_FALSE(validate(simple).empty());
}

TEST_CASE("JSON round trip") {
    for (const Protocol& p : {fixture_pn(2), fixture_ppn(3), build_threshold_rdi({{"x", 1}}, 2, {"x"}).base}) {
        auto j = to_json(p);
        Protocol q = protocol_from_json(j);
        CHECK(q.states == p.states);
        CHECK(q.outputs == p.outputs);
        CHECK(q.leaders == p.leaders);
        CHECK(q.inputs == p.inputs);
        CHECK(to_json(q).dump() == j.dump());
    }
    RDIProtocol r = build_remainder_rdi({{"x", 5}, {"y", 6}}, 4, 7, {"x", "y"});
    CHECK(to_json(rdi_from_json(to_json(r))).dump() == to_json(r).dump());
}

TEST_CASE("spp_to_fopp shape") {
    RDIProtocol rdi = build_threshold_rdi({{"x", 1}}, 2, {"x"});
    Protocol f = spp_to_fopp(rdi.base);
    CHECK(f.states.size() == 2 * rdi.base.states.size());
    CHECK(f.flavor == Flavor::FullOutput);
    CHECK(validate(f).empty());
    auto has = [&](std::vector<std::string> pre, std::vector<std::string> post) {
        Multiset a = named(f, pre), b = named(f, post);
        for (const auto& t : f.transitions)
            if (t.pre == a && t.post == b) return true;
        return false;
    };
    CHECK(has({"f#1"}, {"f#0"}));
    CHECK(has({"t#0"}, {"t#1"}));
    for (const auto& a : rdi.base.states) CHECK(has({a + "#1", "f#0"}, {a + "#0", "f#0"}));
}

TEST_CASE("fopp_to_spp shape") {
    Protocol p = fixture_ppn(2);
    Protocol s = fopp_to_spp(p);
    CHECK(s.states.size() == p.states.size() + 3);
    CHECK(ms_size(s.leaders) == ms_size(p.leaders) + 1);
    CHECK(s.flavor == Flavor::Simple);
    CHECK(validate(s).empty());
}

TEST_CASE("conversions preserve verdicts on the fixtures") {
    for (int n = 1; n <= 2; ++n) {
        for (const Protocol& p : {fixture_pn(n), fixture_ppn(n)}) {
            CHECK(verdict_mismatches(p, 1 << n, 5) == 0);
            Protocol s = fopp_to_spp(p);
            CHECK(verdict_mismatches(s, 1 << n, 5) == 0);
            CHECK(verdict_mismatches(spp_to_fopp(s), 1 << n, 5) == 0);
        }
    }
    // P_1 as a simple protocol decides x >= 2 at x = 2
    Protocol s = fopp_to_spp(fixture_pn(1));
    ExplicitMachine m(s);
    CHECK(check_input(m, {{"x", 2}}, 1, 100000).verdict == Verdict::Pass);
}

TEST_CASE("fopp_to_spp on a constant-one protocol") {
    Protocol p;
    p.flavor = Flavor::FullOutput;
    p.add_var("x", p.add_state("one", 1));
    Protocol s = fopp_to_spp(p);
    auto r = check_computes([&] { return std::make_shared<ExplicitMachine>(s); },
                            [](const Valuation&) { return 1; }, inputs_between(s.vars, 1, 4));
    CHECK(r.ok());
}

TEST_CASE("agent conservation along random runs") {
    std::mt19937_64 rng(4);
    for (const Protocol& p : {fixture_pn(3), fixture_ppn(3), spp_to_fopp(fixture_ppn(2))}) {
        for (int run = 0; run < 20; ++run) {
            Config c = initial_config(p, {{"x", 2 + run % 5}});
            const std::size_t size = ms_size(c);
            for (int step = 0; step < 50; ++step) {
                auto succ = successors(p, c);
                if (succ.empty()) break;
                c = succ[std::uniform_int_distribution<std::size_t>(0, succ.size() - 1)(rng)].second;
                REQUIRE(ms_size(c) == size);
            }
        }
    }
}
