#include <bit>
#include <random>
#include <set>

#include "doctest.h"
#include "ppf/fixtures.hpp"
#include "ppf/large.hpp"
#include "ppf/verify.hpp"
#include "support.hpp"

using namespace ppf;
using namespace ppf::testing;

namespace {

// Independent decomposition: greedily subtract the largest power of two.
std::multiset<std::string> rep_oracle(std::int64_t d) {
    std::multiset<std::string> r;
    if (d == 0) return {"0"};
    const char* sign = d > 0 ? "+" : "-";
    std::int64_t mag = d > 0 ? d : -d;
    while (mag > 0) {
        std::int64_t p = 1;
        while (p * 2 <= mag) p *= 2;
        r.insert(sign + std::to_string(p));
        mag -= p;
    }
    return r;
}

int connectives(const Node& n) {
    if (n.op == Node::Op::Leaf) return 0;
    return 1 + connectives(*n.lhs) + (n.rhs ? connectives(*n.rhs) : 0);
}

}  // namespace

TEST_CASE("canonical representation") {
    auto ms = [](std::vector<std::string> v) { return std::multiset<std::string>(v.begin(), v.end()); };
    CHECK(ms(canonical_rep(13, 3)) == std::multiset<std::string>{"+8", "+4", "+1"});
    CHECK(canonical_rep(0, 2) == std::vector<std::string>{"0"});
    CHECK(ms(canonical_rep(-5, 2)) == std::multiset<std::string>{"-4", "-1"});
    CHECK(ms(canonical_rep(6, 2, false)) == std::multiset<std::string>{"4", "2"});
    CHECK_THROWS_AS(canonical_rep(8, 2), std::out_of_range);
    for (std::int64_t d = -63; d <= 63; ++d) CHECK(ms(canonical_rep(d, 5)) == rep_oracle(d));
}

TEST_CASE("atomic RDI sizes") {
    RDIProtocol thr = build_threshold_rdi({{"x", 1}}, 2, {"x"});
    CHECK(thr.base.states.size() == 17);
    CHECK(thr.base.helper_count() == 5);
    CHECK(thr.base.width() <= 2 + 2);
    CHECK(validate(thr.base).empty());

    RDIProtocol rem = build_remainder_rdi({{"x", 5}, {"y", 6}}, 4, 7, {"x", "y"});
    CHECK(rem.base.states.size() == 19);
    CHECK(rem.base.helper_count() == 7);
    CHECK(ms_count(rem.base.leaders, rem.base.at("f")) == 1);
    CHECK(ms_count(rem.base.leaders, rem.base.at("0")) == 6);

    // closed forms |X| + (2n+3)(|X|+1) + 2 and |X| + (n+2)(|X|+1) + 2
    for (std::int64_t b = 1; b <= 20; ++b) {
        const std::size_t n = static_cast<std::size_t>(std::bit_width(static_cast<std::uint64_t>(b)));
        CHECK(build_threshold_rdi({{"x", 1}, {"y", -1}}, b, {"x", "y"}).base.states.size() == 2 + (2 * n + 3) * 3 + 2);
    }
}

TEST_CASE("threshold RDI equal transition") {
    RDIProtocol thr = build_threshold_rdi({{"x", 1}}, 2, {"x"});
    const Protocol& p = thr.base;
    bool found = false;
    for (const auto& t : p.transitions)
        if (t.label == "equal") {
            CHECK(t.pre == ms_of({p.at("+2"), p.at("f")}));
            CHECK(t.post == ms_of({p.at("+2"), p.at("t")}));
            found = true;
        }
    CHECK(found);
}

TEST_CASE("threshold RDI grows linearly while the unary fixture doubles") {
    std::vector<std::size_t> sizes;
    for (int n = 1; n <= 10; ++n) {
        Formula phi = parse("x > " + std::to_string((1 << n) - 1));
        Atom a = normalize(phi).root->atom;
        sizes.push_back(build_rdi(a, phi.vars).base.states.size());
        CHECK(fixture_pn(n).states.size() == (std::size_t{1} << n) + 1);
    }
    for (std::size_t i = 2; i < sizes.size(); ++i) CHECK(sizes[i] - sizes[i - 1] == sizes[1] - sizes[0]);
}

TEST_CASE("tilde transform") {
    Formula phi = parse("3*x1 - 2*x2 > 6");
    Atom t = tilde_transform(phi.root->atom, 4);
    CHECK(t.coeff(hi_var("x1")) == 12);
    CHECK(t.coeff(lo_var("x1")) == 3);
    CHECK(t.coeff(hi_var("x2")) == -8);
    CHECK(t.coeff(lo_var("x2")) == -2);
    CHECK(t.bound == phi.root->atom.bound);

    Atom id = tilde_transform(phi.root->atom, 1);
    CHECK(id.coeff(hi_var("x1")) == 3);
    CHECK(id.coeff(lo_var("x1")) == 3);

    std::mt19937_64 rng(7);
    std::uniform_int_distribution<std::int64_t> d(0, 12);
    for (const char* src : {"3*x1 - 2*x2 > 6", "x1 + x2 >= 2 (mod 3)", "2*x1 = 1 (mod 5)"}) {
        Formula f = parse(src);
        Formula n = normalize(f);
        for (int i = 0; i < 100; ++i) {
            const std::int64_t k = std::uniform_int_distribution<std::int64_t>(2, 5)(rng);
            Valuation hl, v;
            for (const auto& x : f.vars) {
                hl[hi_var(x)] = d(rng);
                hl[lo_var(x)] = d(rng);
                v[x] = k * hl[hi_var(x)] + hl[lo_var(x)];
            }
            for (const Atom& a : leaves(*n.root)) CHECK(eval_atom(tilde_transform(a, k), hl) == eval_atom(a, v));
        }
    }
}

TEST_CASE("dispatch helpers and transitions") {
    const std::size_t k = 5;
    std::vector<RDIProtocol> rdis;
    for (int b = 1; b <= static_cast<int>(k); ++b)
        rdis.push_back(build_threshold_rdi({{hi_var("x"), static_cast<std::int64_t>(k)}, {lo_var("x"), 1}}, b,
                                           tilde_vars({"x"})));
    MultiOutputProtocol mop = combine_multi_output(rdis, {"x"}, k);
    const Protocol& p = mop.base;
    CHECK(ms_count(p.leaders, p.at("h_x")) == 16);
    CHECK(mop.outs.size() == k);
    for (const auto& t : p.transitions) {
        if (t.label == "split_hi_x") {
            CHECK(t.pre == ms_of(std::vector<Sid>(k, p.at("x"))));
            CHECK(ms_size(t.post) == k);
        }
        if (t.label == "split_lo_x") {
            CHECK(ms_count(t.pre, p.at("h_x")) == k - 1);
            CHECK(ms_count(t.pre, p.at("x")) == 1);
            CHECK(ms_size(t.post) == k);
        }
    }
    // 17 = 5*3 + 2 agents end up as 3 high and 2 low inputs for each of the 5 protocols
    CHECK((3 + 2) * k == 25);
    CHECK_THROWS(combine_multi_output({rdis[0]}, {"x"}, 1));
}

TEST_CASE("boolean combination adds two states and one helper per connective") {
    for (const char* src : {"x >= 2 & x >= 3", "(x > 1 | x - y > 0) & !(y >= 1 (mod 2))", "x > 1 | x > 2"}) {
        LargeResult r = compile_large(parse(src));
        const int c = connectives(*r.normalized.root);
        CHECK(r.stats[2].states == r.stats[1].states + 2 * c);
        CHECK(r.stats[2].helpers == r.stats[1].helpers + c);
        bool and_seen = false;
        for (const auto& t : r.combined.transitions) and_seen |= t.label.rfind("c", 0) == 0 && t.width() == 3;
        CHECK(and_seen);
    }
    LargeResult atomic = compile_large(parse("x >= 2"));
    CHECK(atomic.stats[2].states == atomic.stats[1].states);
}

TEST_CASE("k-way to 2-way") {
    Protocol two = toy_greater();
    Protocol same = kway_to_2way(two);
    CHECK(same.states == two.states);
    CHECK(same.transitions.size() == two.transitions.size());

    Protocol p;
    p.add_var("x", p.add_state("a"));
    p.add({"a", "b", "c"}, {"d", "e", "f"}, "wide");
    Protocol q = kway_to_2way(p);
    CHECK(q.width() == 2);
    CHECK(q.states.size() <= p.states.size() + 9);

    RDIProtocol thr = build_threshold_rdi({{"x", 1}}, 2, {"x"});
    Protocol w = kway_to_2way(thr.base);
    CHECK(w.width() == 2);
    CHECK(w.states.size() <= thr.base.states.size() + 3 * thr.base.width() * thr.base.transitions.size());
    for (int x = 1; x <= 3; ++x) {
        ExplicitMachine a(thr.base), b(w);
        auto ra = check_input(a, {{"x", x}}, x >= 2, 1000000);
        auto rb = check_input(b, {{"x", x}}, x >= 2, 1000000);
        CHECK(ra.verdict == Verdict::Pass);
        CHECK(rb.verdict == ra.verdict);
    }
}

TEST_CASE("helper order") {
    Protocol p;
    p.add_state("q");
    p.add_state("p");
    p.leaders = ms_of({p.at("q"), p.at("q"), p.at("p"), p.at("q")});
    auto order = helper_order(p);
    CHECK(order == std::vector<Sid>{p.at("p"), p.at("q"), p.at("q"), p.at("q")});
}

TEST_CASE("helper removal on the cancelling toy") {
    Protocol toy = toy_greater();
    HelperRemovalMachine m(toy);
    CHECK(m.ell() == 1);
    const std::uint64_t q = toy.states.size();
    CHECK(*m.declared_states() == m.ell() * toy.vars.size() + q * (q + 1) / 2);
    auto r = check_computes([toy] { return std::make_shared<HelperRemovalMachine>(toy); },
                            [](const Valuation& v) { return v.at("x") > v.at("y") ? 1 : 0; },
                            inputs_between(toy.vars, 2, 3));
    CHECK(r.ok());
    CHECK(r.fail == 0);
}

TEST_CASE("helper removal guards small populations") {
    // with three helpers the guarantee starts at |v| >= 3
    Protocol toy = toy_greater();
    toy.leaders = ms_of({toy.at("y"), toy.at("y"), toy.at("y")});
    auto r = check_computes([toy] { return std::make_shared<HelperRemovalMachine>(toy); },
                            [](const Valuation& v) { return v.at("x") > v.at("y") ? 1 : 0; },
                            inputs_between(toy.vars, 3, 4));
    CHECK(r.ok());
}

TEST_CASE("compile_large") {
    LargeResult r = compile_large(parse("x >= 2"));
    CHECK(r.ell == 5);
    CHECK(r.stats.size() == 5);
    CHECK(r.machine()->leaders().empty());
    CHECK(r.two_way.width() == 2);

    // l stays within a cubic bound in the formula length on a small corpus
    for (const char* src : {"x > 1", "x - y > 0", "2*x - y > 2", "x >= 1 (mod 2)", "x > 1 & y > 1",
                            "(x > 1 | y > 2) & !(x - y > 0)"}) {
        Formula phi = parse(src);
        const std::size_t len = static_cast<std::size_t>(std::max(2, metrics(phi).len));
        CHECK(compile_large(phi).ell <= 8 * len * len * len);
    }
}

TEST_CASE("threshold RDI conserves value along initialization sequences") {
    for (const auto& [a, b] : std::vector<std::pair<Coeffs, std::int64_t>>{
             {{{"x", 1}}, 2}, {{{"x", 2}, {"y", -1}}, 3}, {{{"x", -3}, {"y", 2}}, 1}}) {
        std::vector<std::string> vars;
        for (const auto& [x, c] : a) vars.push_back(x);
        RDIProtocol rdi = build_threshold_rdi(a, b, vars);
        int checked = 0;
        random_init_sequences(rdi, 1000, 30, 11, [&](const Protocol& p, const InitRun& r) {
            REQUIRE(config_value(p, a, r.c) == dot(a, r.w));
            std::size_t numeric = 0, agents_for_x = 0;
            for (const auto& [s, n] : r.c) {
                if (value_of(p.states[s])) numeric += n;
            }
            for (const auto& x : vars) {
                agents_for_x = ms_count(r.c, p.at(x));
                for (const auto& [s, n] : r.c)
                    if (p.states[s].size() > x.size() && p.states[s].ends_with("_" + x)) agents_for_x += n;
                REQUIRE(static_cast<std::int64_t>(agents_for_x) == (r.w.count(x) ? r.w.at(x) : 0));
            }
            std::size_t w_total = 0;
            for (const auto& [x, n] : r.w) w_total += static_cast<std::size_t>(n);
            REQUIRE(ms_size(r.c) == ms_size(p.leaders) + w_total);
            REQUIRE(numeric >= ms_size(p.leaders) - 1);
            ++checked;
        });
        CHECK(checked >= 1000);
    }
}

TEST_CASE("remainder RDI conserves value modulo m") {
    Coeffs a{{"x", 5}, {"y", 6}};
    RDIProtocol rdi = build_remainder_rdi(a, 4, 7, {"x", "y"});
    random_init_sequences(rdi, 1000, 30, 12, [&](const Protocol& p, const InitRun& r) {
        const std::int64_t diff = config_value(p, a, r.c) - dot(a, r.w);
        REQUIRE(((diff % 7) + 7) % 7 == 0);
    });
}

TEST_CASE("remainder RDI value can exceed a.w after a reversed modulo") {
    // modulo-1 recreates rep(m) from zeros that were never consumed by modulo
    Coeffs a{{"x", 1}};
    RDIProtocol rdi = build_remainder_rdi(a, 2, 3, {"x"});
    bool exceeded = false;
    random_init_sequences(rdi, 200, 30, 13, [&](const Protocol& p, const InitRun& r) {
        exceeded |= config_value(p, a, r.c) > dot(a, r.w);
    });
    CHECK(exceeded);
}
