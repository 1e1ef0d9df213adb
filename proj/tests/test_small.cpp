#include "doctest.h"
#include "ppf/small.hpp"
#include "ppf/verify.hpp"

using namespace ppf;

namespace {

MachineFactory explicit_factory(const Protocol& p) {
    return [p] { return std::make_shared<ExplicitMachine>(p); };
}

std::int64_t dot(const Coeffs& a, const Valuation& v) {
    std::int64_t s = 0;
    for (const auto& [x, c] : a) s += c * (v.count(x) ? v.at(x) : 0);
    return s;
}

// Two states and one leader: any x agent converts everyone to 1.
Protocol toy_leader() {
    Protocol p;
    p.flavor = Flavor::General;
    p.add_var("x", p.add_state("one", 1));
    p.add_var("y", p.add_state("zero", 0));
    p.leaders = ms_of({p.at("zero")});
    p.add(std::vector<std::string>{"one", "zero"}, {"one", "one"}, "spread");
    return p;
}

}  // namespace

TEST_CASE("greater-sum shape") {
    auto s = greater_sum_shape({{"x", 1}, {"y", -1}}, 0, 2);
    CHECK(s.m == bit_length(2));
    CHECK(s.seed_x == 0);
    CHECK(s.seed_y == 0);
    auto t = greater_sum_shape({{"x", 3}}, 5, 4);
    CHECK(t.seed_y == 5);
    CHECK(t.m == bit_length(12));
    auto u = greater_sum_shape({{"x", 1}}, -3, 2);
    CHECK(u.seed_x == 3);
    CHECK(u.m == bit_length(5));
    CHECK_THROWS(build_greater_sum_halting({{"x", 1}}, 0, 1, {"x"}));
}

TEST_CASE("greater-sum decides a.v > c at fixed size and halts") {
    const std::vector<std::string> vars{"x", "y"};
    int cases = 0;
    for (std::int64_t ax = -2; ax <= 2; ++ax)
        for (std::int64_t ay = -2; ay <= 2; ++ay)
            for (std::int64_t c = -2; c <= 2; ++c)
                for (int i = 2; i <= 3; ++i) {
                    Coeffs a{{"x", ax}, {"y", ay}};
                    Protocol p = build_greater_sum_halting(a, c, i, vars);
                    REQUIRE(p.flavor == Flavor::Halting);
                    REQUIRE(ms_size(p.leaders) == 1);
                    auto inputs = inputs_between(vars, i, i);
                    auto r = check_computes(explicit_factory(p),
                                            [&](const Valuation& v) { return dot(a, v) > c ? 1 : 0; }, inputs);
                    REQUIRE(r.ok());
                    ExplicitMachine m(p);
                    REQUIRE(check_halting(m, inputs).ok());
                    ++cases;
                }
    CHECK(cases == 250);
}

TEST_CASE("greater-sum for x - y > 0 at sizes two and three") {
    for (int i = 2; i <= 3; ++i) {
        Protocol p = build_greater_sum_halting({{"x", 1}, {"y", -1}}, 0, i, {"x", "y"});
        CHECK(validate(p).empty());
        ExplicitMachine m(p);
        CHECK(check_halting(m, inputs_between(p.vars, i, i)).ok());
        auto r = check_computes(explicit_factory(p), [](const Valuation& v) { return v.at("x") > v.at("y"); },
                                inputs_between(p.vars, i, i));
        CHECK(r.ok());
        CHECK(r.pass == static_cast<std::size_t>(i + 1));
    }
}

TEST_CASE("remainder halting") {
    struct Case {
        Coeffs a;
        std::int64_t m, lo, hi;
    };
    const std::vector<std::string> vars{"x", "y"};
    for (const Case& c : std::vector<Case>{{{{"x", 1}}, 2, 0, 0},
                                           {{{"x", 1}, {"y", -2}}, 3, 1, 2},
                                           {{{"x", 1}}, 2, 1, 1},
                                           {{{"x", 4}, {"y", 1}}, 3, 0, 1}}) {
        for (int i = 2; i <= 3; ++i) {
            MachinePtr m = build_remainder_halting(c.a, c.m, c.lo, c.hi, i, vars);
            auto inputs = inputs_between(vars, i, i);
            auto r = check_computes([&] { return build_remainder_halting(c.a, c.m, c.lo, c.hi, i, vars); },
                                    [&](const Valuation& v) {
                                        const std::int64_t res = floor_mod(dot(c.a, v), c.m);
                                        return c.lo <= res && res <= c.hi ? 1 : 0;
                                    },
                                    inputs);
            CHECK(r.ok());
            CHECK(check_halting(*m, inputs).ok());
        }
    }
}

TEST_CASE("negation flips final outputs only") {
    Protocol p = build_greater_sum_halting({{"x", 1}}, 0, 2, {"x", "y"});
    auto base = std::make_shared<ExplicitMachine>(p);
    NegateMachine n(base);
    CHECK(n.output(p.at("f")) == 1);
    CHECK(n.output(p.at("t")) == 0);
    CHECK(n.leaders() == base->leaders());
    CHECK(n.width() == base->width());
}

TEST_CASE("halting combination keeps input tags") {
    Formula phi = parse("x > 0 & y > 0");
    MachinePtr m = halting_for_size(phi, 3);
    auto* hc = dynamic_cast<HaltingCombineMachine*>(m.get());
    REQUIRE(hc != nullptr);
    for (std::size_t i = 0; i < phi.vars.size(); ++i) CHECK(hc->tag_of(hc->input(i)) == static_cast<int>(i));
    for (Sid l : ms_items(hc->leaders())) CHECK(hc->tag_of(l) == static_cast<int>(phi.vars.size()));
    CHECK(hc->width() == 2);
}

TEST_CASE("halting machines for formula trees") {
    for (const char* src : {"x > 0 & y > 0", "x - y > 0 | x >= 2 (mod 3)", "!(x = 1 (mod 2))", "x >= 2 & !(y > 0)"}) {
        Formula phi = parse(src);
        for (int i = 2; i <= 3; ++i) {
            auto inputs = inputs_between(phi.vars, i, i);
            auto r = check_computes([&] { return halting_for_size(phi, i); }, guarded(phi, "none"), inputs);
            CHECK_MESSAGE(r.ok(), src << " at size " << i);
            MachinePtr m = halting_for_size(phi, i);
            CHECK(check_halting(*m, inputs).ok());
        }
    }
}

TEST_CASE("fixed-size dispatcher") {
    Formula phi = parse("x > 0");
    SmallResult s = compile_small(phi, 3);
    CHECK(s.parts.size() == 1);
    CHECK(ms_size(s.fixed->leaders()) == 1);
    auto r = check_computes([&] { return MachinePtr(compile_small(phi, 3).fixed); }, guarded(phi, "lt:3"),
                            inputs_between(phi.vars, 2, 4));
    CHECK(r.ok());
    // a missing part is rejected
    CHECK_THROWS(FixedSizeMachine({}, 3, phi.vars));
}

TEST_CASE("leader removal on a two-state toy") {
    Protocol toy = toy_leader();
    auto base = std::make_shared<ExplicitMachine>(toy);
    Formula phi = parse("x > 0 & y >= 0");
    REQUIRE(phi.vars == toy.vars);
    auto r = check_computes([toy] { return std::make_shared<KillLeaderMachine>(std::make_shared<ExplicitMachine>(toy), 3); },
                            guarded(parse("x > 0"), "lt:3"), inputs_between(toy.vars, 2, 4));
    CHECK(r.ok());
    KillLeaderMachine k(base, 3);
    CHECK(k.leaders().empty());
    // |Q|^(L+1) |X| l^2 + 2|X||Q| + 1
    CHECK(*k.declared_states() == 4 * 2 * 9 + 2 * 2 * 2 + 1);
}

TEST_CASE("compile_small for x > 0 with cutoff three") {
    Formula phi = parse("x > 0");
    CHECK_THROWS(compile_small(phi, 2));
    auto r = check_computes([&] { return MachinePtr(compile_small(phi, 3).machine); }, guarded(phi, "lt:3"),
                            inputs_between(phi.vars, 2, 4));
    CHECK(r.ok());
    CHECK(r.pass == 3);
}
