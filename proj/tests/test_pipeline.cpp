#include "doctest.h"
#include "ppf/pipeline.hpp"

using namespace ppf;

TEST_CASE("cutoff") {
    CHECK(compute_cutoff(parse("x >= 2")) == 5);
    CHECK(compute_cutoff(parse("x > 0")) == 3);
    CHECK(compute_cutoff(parse("x > 1 & y > 1")) >= 3);
}

TEST_CASE("full compilation reports every stage") {
    CompilationResult r = compile(parse("x > 1"), "full");
    std::vector<std::string> names;
    for (const auto& s : r.stats) names.push_back(s.name);
    CHECK(names == std::vector<std::string>{"rdi", "dispatch", "boolean", "2way", "helpers-removed", "small-parts",
                                            "fixed-size", "leaderless-small", "product"});
    CHECK(r.ell == 5);
    for (std::size_t i = 4; i < r.stats.size(); ++i) CHECK_FALSE(r.stats[i].transitions.has_value());
    auto j = r.to_json();
    CHECK(j.contains("recipe"));
    CHECK(j["stats"][8]["transitions"].is_null());
}

TEST_CASE("mode specific results") {
    CompilationResult t = compile(parse("x >= 2"), "rdi-threshold");
    REQUIRE(t.rdi.has_value());
    CHECK(t.stats.at(0).states == 17);
    CHECK(t.stats.at(0).helpers == 5);
    CHECK_THROWS(compile(parse("x >= 2"), "rdi-remainder"));
    CHECK_THROWS(compile(parse("x > 0 & y > 0"), "rdi-threshold"));

    CompilationResult g = compile(parse("x - y > 0"), "greater-sum", 3);
    REQUIRE(g.protocol.has_value());
    CHECK(g.protocol->flavor == Flavor::Halting);
    CHECK_THROWS(compile(parse("x - y > 0"), "greater-sum", 1));
    CHECK_THROWS(compile(parse("x > 0"), "bogus"));

    CompilationResult l = compile(parse("x > 1"), "large");
    CHECK(l.stats.size() == 5);
    CHECK(l.protocol.has_value());
    CHECK(l.protocol->leaders.empty());
}

TEST_CASE("recompiling is byte-identical") {
    for (const char* src : {"x >= 2", "5*x + 6*y >= 4 (mod 7)"}) {
        const std::string mode = std::string(src).find("mod") == std::string::npos ? "rdi-threshold" : "rdi-remainder";
        CHECK(compile(parse(src), mode).to_json().dump(2) == compile(parse(src), mode).to_json().dump(2));
    }
    CHECK(compile(parse("x > 1"), "full").to_json().dump(2) == compile(parse("x > 1"), "full").to_json().dump(2));
}

TEST_CASE("load_machine round trips") {
    CompilationResult g = compile(parse("x - y > 0"), "greater-sum", 2);
    MachinePtr a = load_machine(g.to_json())();
    auto r = check_computes([&] { return load_machine(g.to_json())(); },
                            [](const Valuation& v) { return v.at("x") > v.at("y") ? 1 : 0; },
                            inputs_between(a->vars, 2, 2));
    CHECK(r.ok());

    CompilationResult t = compile(parse("x >= 2"), "rdi-threshold");
    MachinePtr b = load_machine(t.to_json())();
    CHECK(ms_size(b->leaders()) == 5);

    CompilationResult f = compile(parse("x > 1"), "small", 3);
    MachinePtr c = load_machine(f.to_json())();
    CHECK(c->leaders().empty());
    CHECK(c->vars == f.formula.vars);
}

TEST_CASE("product of the halves computes x > 1") {
    // the full protocol on sizes explorable under the cap
    CompilationResult r = compile(parse("x > 0"), "full", 0, MaterializeLimits{0, 0});
    auto rep = check_computes(r.factory, guarded(parse("x > 0"), "none"), inputs_between(r.formula.vars, 2, 2),
                              2000000);
    CHECK(rep.fail == 0);
}
