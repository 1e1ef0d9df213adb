#include "ppf/pipeline.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "ppf/convert.hpp"
#include "ppf/small.hpp"

namespace ppf {

namespace {

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
    if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) return std::numeric_limits<std::uint64_t>::max();
    return a * b;
}

StageStat implicit_stat(const std::string& name, const Machine& m, std::uint64_t helpers) {
    return StageStat{name, m.declared_states().value_or(0), std::nullopt, helpers, m.width()};
}

std::vector<StageStat> small_stats(const SmallResult& s) {
    StageStat parts{"small-parts", 0, std::nullopt, 0, 2};
    for (const auto& [i, m] : s.parts) {
        parts.states += m->declared_states().value_or(0);
        parts.helpers += ms_size(m->leaders());
        parts.width = std::max(parts.width, m->width());
    }
    return {parts, implicit_stat("fixed-size", *s.fixed, 1), implicit_stat("leaderless-small", *s.machine, 0)};
}

const Atom& single_atom(const Formula& f, const char* mode) {
    if (f.root->op != Node::Op::Leaf) throw std::invalid_argument(std::string(mode) + " needs a single atom");
    return f.root->atom;
}

}  // namespace

std::size_t compute_cutoff(const Formula& phi) { return std::max<std::size_t>(3, compile_large(phi).ell); }

MachinePtr product_and(MachinePtr a, MachinePtr b) {
    return std::make_shared<ProductMachine>(std::make_shared<FullOutputMachine>(std::move(a)),
                                            std::make_shared<FullOutputMachine>(std::move(b)));
}

const std::vector<std::string>& compile_modes() {
    static const std::vector<std::string> modes{"large",         "small",         "full",
                                                "rdi-threshold", "rdi-remainder", "greater-sum"};
    return modes;
}

nlohmann::json stats_json(const std::vector<StageStat>& stats) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& s : stats) {
        nlohmann::json t = s.transitions ? nlohmann::json(*s.transitions) : nlohmann::json(nullptr);
        a.push_back({{"stage", s.name}, {"states", s.states}, {"transitions", t}, {"helpers", s.helpers},
                     {"width", s.width}});
    }
    return a;
}

nlohmann::json CompilationResult::to_json() const {
    nlohmann::json j;
    j["formula"] = ppf::to_string(formula);
    j["mode"] = mode;
    if (size) j["size"] = size;
    j["ell"] = ell;
    j["stats"] = stats_json(stats);
    if (rdi)
        j["protocol"] = ppf::to_json(*rdi);
    else if (protocol)
        j["protocol"] = ppf::to_json(*protocol);
    else
        j["recipe"] = {{"formula", ppf::to_string(formula)}, {"mode", mode}, {"size", size}};
    return j;
}

CompilationResult compile(const Formula& phi, const std::string& mode, int size, const MaterializeLimits& limits) {
    CompilationResult r;
    r.formula = phi;
    r.mode = mode;
    r.size = size;
    auto explicit_factory = [&r](Protocol p) {
        r.protocol = p;
        r.factory = [p] { return std::make_shared<ExplicitMachine>(p); };
    };

    if (mode == "rdi-threshold" || mode == "rdi-remainder") {
        Formula n = normalize(phi);
        const Atom& a = single_atom(n, mode.c_str());
        const AtomKind want = mode == "rdi-threshold" ? AtomKind::AtLeast : AtomKind::ModAtLeast;
        if (a.kind != want) throw std::invalid_argument(mode + " does not match the atom " + ppf::to_string(a));
        r.rdi = build_rdi(a, phi.vars);
        Protocol full = r.rdi->with_dagger();
        StageStat s = stat_of("rdi", full);
        s.transitions = full.transitions.size();
        r.stats.push_back(s);
        r.ell = ms_size(r.rdi->base.leaders);
        Protocol base = r.rdi->base;
        r.factory = [base] { return std::make_shared<ExplicitMachine>(base); };
        return r;
    }
    if (mode == "greater-sum") {
        const Atom& a = single_atom(phi, "greater-sum");
        if (a.kind != AtomKind::Greater && a.kind != AtomKind::AtLeast)
            throw std::invalid_argument("greater-sum needs a threshold atom");
        if (size < 2) throw std::invalid_argument("greater-sum needs --size of at least 2");
        Coeffs c;
        for (const auto& x : phi.vars) c[x] = a.coeff(x);
        Protocol p = build_greater_sum_halting(c, a.kind == AtomKind::Greater ? a.bound : a.bound - 1, size, phi.vars);
        r.stats.push_back(stat_of("greater-sum", p));
        explicit_factory(std::move(p));
        return r;
    }
    if (mode != "large" && mode != "small" && mode != "full") throw std::invalid_argument("unknown mode '" + mode + "'");

    std::optional<LargeResult> large;
    if (mode != "small" || size == 0) {
        large = compile_large(phi);
        r.ell = std::max<std::size_t>(3, large->ell);
    }
    if (mode == "small" && size > 0) r.ell = static_cast<std::size_t>(size);

    if (mode == "large") {
        r.stats = large->stats;
        Protocol two_way = large->two_way;
        r.factory = [two_way] { return std::make_shared<HelperRemovalMachine>(two_way); };
    } else {
        SmallResult s = compile_small(phi, r.ell);
        auto sst = small_stats(s);
        const std::size_t ell = r.ell;
        if (mode == "small") {
            r.stats = sst;
            r.factory = [phi, ell] { return MachinePtr(compile_small(phi, ell).machine); };
        } else {
            r.stats = large->stats;
            r.stats.insert(r.stats.end(), sst.begin(), sst.end());
            const std::uint64_t a = 2 * r.stats[4].states, b = 2 * sst.back().states;
            r.stats.push_back(StageStat{"product", sat_mul(a, b), std::nullopt, 0, 2});
            Protocol two_way = large->two_way;
            r.factory = [phi, ell, two_way] {
                return product_and(std::make_shared<HelperRemovalMachine>(two_way), compile_small(phi, ell).machine);
            };
        }
    }
    // the leaderless small half never fits the state limit
    if (limits.max_states == 0 || mode != "large") return r;
    MachinePtr m = r.factory();
    if (auto p = materialize(*m, limits)) r.protocol = std::move(*p);
    return r;
}

MachineFactory load_machine(const nlohmann::json& doc) {
    if (doc.contains("recipe")) {
        const auto& rc = doc.at("recipe");
        Formula phi = parse(rc.at("formula").get<std::string>());
        return compile(phi, rc.at("mode").get<std::string>(), rc.value("size", 0), MaterializeLimits{0, 0}).factory;
    }
    const nlohmann::json& p = doc.contains("protocol") ? doc.at("protocol") : doc;
    Protocol proto = p.contains("dagger") ? rdi_from_json(p).base : protocol_from_json(p);
    return [proto] { return std::make_shared<ExplicitMachine>(proto); };
}

}  // namespace ppf
