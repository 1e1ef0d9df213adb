#pragma once

#include <map>
#include <optional>
#include <random>
#include <string>

#include "ppf/large.hpp"

namespace ppf::testing {

// Numeric value carried by a state name such as "+4", "-1_x", "8" or "0_y".
inline std::optional<std::int64_t> value_of(const std::string& name) {
    std::string s = name.substr(0, name.find('_'));
    if (s.empty()) return std::nullopt;
    const std::size_t digits = s[0] == '+' || s[0] == '-' ? 1 : 0;
    if (s.size() == digits || s.find_first_not_of("0123456789", digits) != std::string::npos) return std::nullopt;
    return std::stoll(s);
}

// Input states carry their coefficient, numeric states their number.
inline std::int64_t config_value(const Protocol& p, const Coeffs& a, const Config& c) {
    std::int64_t v = 0;
    for (const auto& [s, n] : c) {
        if (auto it = a.find(p.states[s]); it != a.end())
            v += it->second * n;
        else if (auto x = value_of(p.states[s]))
            v += *x * n;
    }
    return v;
}

struct InitRun {
    Config c;
    std::map<std::string, std::int64_t> w;
};

// Random interleaving of input arrivals, departures and transitions of T-infinity and T-dagger.
template <typename Check>
void random_init_sequences(const RDIProtocol& rdi, int runs, int length, std::uint64_t seed, Check check) {
    const Protocol full = rdi.with_dagger();
    std::mt19937_64 rng(seed);
    for (int run = 0; run < runs; ++run) {
        InitRun r{full.leaders, {}};
        check(full, r);
        for (int step = 0; step < length; ++step) {
            const int kind = std::uniform_int_distribution<int>(0, 3)(rng);
            const std::size_t xi = std::uniform_int_distribution<std::size_t>(0, full.vars.size() - 1)(rng);
            const std::string& x = full.vars[xi];
            const Sid in = full.inputs[xi];
            if (kind == 0) {
                ms_insert(r.c, in);
                ++r.w[x];
            } else if (kind == 1) {
                if (ms_count(r.c, in) == 0) continue;
                r.c = ms_sub(r.c, ms_of({in}));
                --r.w[x];
            } else {
                auto succ = successors(full, r.c);
                if (succ.empty()) continue;
                r.c = succ[std::uniform_int_distribution<std::size_t>(0, succ.size() - 1)(rng)].second;
            }
            check(full, r);
        }
    }
}

inline std::int64_t dot(const Coeffs& a, const std::map<std::string, std::int64_t>& w) {
    std::int64_t s = 0;
    for (const auto& [x, n] : w) s += (a.count(x) ? a.at(x) : 0) * n;
    return s;
}

// Strong X, Y cancel into weak opinions; strong agents convert weak ones and
// weak ties resolve to 0.  One helper starts as a weak 0.
inline Protocol toy_greater() {
    Protocol p;
    p.flavor = Flavor::Simple;
    p.add_var("x", p.add_state("X", 1));
    p.add_var("y", p.add_state("Y", 0));
    p.add_state("x", 1);
    p.add_state("y", 0);
    p.leaders = ms_of({p.at("y")});
    p.add(std::vector<std::string>{"X", "Y"}, {"x", "y"}, "cancel");
    p.add(std::vector<std::string>{"X", "y"}, {"X", "x"}, "raise");
    p.add(std::vector<std::string>{"Y", "x"}, {"Y", "y"}, "lower");
    p.add(std::vector<std::string>{"x", "y"}, {"y", "y"}, "tie");
    return p;
}

}  // namespace ppf::testing
