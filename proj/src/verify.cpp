#include "ppf/verify.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <random>
#include <stdexcept>
#include <thread>
#include <unordered_set>

namespace ppf {

using nlohmann::json;

namespace {

constexpr std::uint32_t kNone = 0xffffffffu;

// Index set over a node vector, probing with an external config.
class NodeIndex {
public:
    explicit NodeIndex(const std::vector<Config>& nodes)
        : nodes_(nodes), set_(16, Hash{this}, Eq{this}) {}

    std::uint32_t find(const Config& c) {
        probe_ = &c;
        auto it = set_.find(kNone);
        return it == set_.end() ? kNone : *it;
    }
    void insert(std::uint32_t i) { set_.insert(i); }

private:
    const Config& at(std::uint32_t i) const { return i == kNone ? *probe_ : nodes_[i]; }
    struct Hash {
        const NodeIndex* self;
        std::size_t operator()(std::uint32_t i) const { return MultisetHash{}(self->at(i)); }
    };
    struct Eq {
        const NodeIndex* self;
        bool operator()(std::uint32_t a, std::uint32_t b) const { return self->at(a) == self->at(b); }
    };
    const std::vector<Config>& nodes_;
    const Config* probe_ = nullptr;
    std::unordered_set<std::uint32_t, Hash, Eq> set_;
};

using Successors = std::function<void(const Config&, std::vector<Step>&)>;

ReachGraph bfs(const std::vector<Config>& roots, const Successors& succ, std::size_t cap, int max_depth = 0) {
    ReachGraph g;
    NodeIndex index(g.nodes);
    std::vector<int> depth;
    for (const auto& r : roots) {
        if (index.find(r) != kNone) continue;
        auto id = static_cast<std::uint32_t>(g.nodes.size());
        g.nodes.push_back(r);
        index.insert(id);
        g.parent.push_back(id);
        g.parent_label.push_back(kNone);
        depth.push_back(0);
    }
    std::vector<Step> steps;
    g.offsets.push_back(0);
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        if (max_depth == 0 || depth[i] < max_depth) {
            Config c = g.nodes[i];
            succ(c, steps);
            for (auto& s : steps) {
                std::uint32_t j = index.find(s.next);
                if (j == kNone) {
                    if (g.nodes.size() >= cap) {
                        g.truncated = true;
                        continue;
                    }
                    j = static_cast<std::uint32_t>(g.nodes.size());
                    g.nodes.push_back(std::move(s.next));
                    index.insert(j);
                    g.parent.push_back(static_cast<std::uint32_t>(i));
                    g.parent_label.push_back(s.label);
                    depth.push_back(depth[i] + 1);
                }
                g.targets.push_back(j);
                g.labels.push_back(s.label);
            }
        } else {
            g.truncated = true;
        }
        g.offsets.push_back(static_cast<std::uint32_t>(g.targets.size()));
    }
    return g;
}

int bottom_value(Machine& m, const ReachGraph& g, const std::vector<std::uint32_t>& members) {
    int v = -3;
    for (auto i : members) {
        int o = m.config_output(g.nodes[i]);
        if (v == -3)
            v = o;
        else if (v != o)
            return 2;
    }
    return v == kBottom ? 2 : v;
}

}  // namespace

std::size_t default_node_cap() {
    if (const char* e = std::getenv("PPF_NODE_CAP")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(e, &end, 10);
        if (end != e && v > 0) return static_cast<std::size_t>(v);
    }
    return 2000000;
}

ReachGraph explore(Machine& m, const Config& c0, std::size_t node_cap) {
    if (ms_size(c0) < 2) throw std::invalid_argument("population size must be at least 2");
    return bfs({c0}, [&](const Config& c, std::vector<Step>& out) { m.steps(c, out); }, node_cap);
}

SccResult tarjan(const ReachGraph& g) {
    const std::uint32_t n = static_cast<std::uint32_t>(g.size());
    SccResult r;
    r.comp.assign(n, kNone);
    std::vector<std::uint32_t> index(n, kNone), low(n, 0), stack;
    std::vector<bool> on(n, false);
    std::uint32_t next = 0;
    struct Frame {
        std::uint32_t v, edge;
    };
    std::vector<Frame> call;
    for (std::uint32_t s = 0; s < n; ++s) {
        if (index[s] != kNone) continue;
        call.push_back({s, g.offsets[s]});
        index[s] = low[s] = next++;
        stack.push_back(s);
        on[s] = true;
        while (!call.empty()) {
            Frame& f = call.back();
            if (f.edge < g.offsets[f.v + 1]) {
                std::uint32_t w = g.targets[f.edge++];
                if (index[w] == kNone) {
                    index[w] = low[w] = next++;
                    stack.push_back(w);
                    on[w] = true;
                    call.push_back({w, g.offsets[w]});
                } else if (on[w]) {
                    low[f.v] = std::min(low[f.v], index[w]);
                }
                continue;
            }
            std::uint32_t v = f.v;
            call.pop_back();
            if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
            if (low[v] == index[v]) {
                std::uint32_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on[w] = false;
                    r.comp[w] = r.count;
                } while (w != v);
                ++r.count;
            }
        }
    }
    r.bottom.assign(r.count, true);
    for (std::uint32_t v = 0; v < n; ++v)
        for (auto e = g.offsets[v]; e < g.offsets[v + 1]; ++e)
            if (r.comp[g.targets[e]] != r.comp[v]) r.bottom[r.comp[v]] = false;
    return r;
}

std::vector<std::string> witness(Machine& m, const ReachGraph& g, std::uint32_t node) {
    std::vector<std::string> trace;
    while (g.parent[node] != node) {
        trace.push_back(m.label(g.parent_label[node]));
        node = g.parent[node];
    }
    std::reverse(trace.begin(), trace.end());
    return trace;
}

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::Fail: return "fail";
        case Verdict::Inconclusive: return "inconclusive-truncated";
    }
    return "?";
}

void Report::add(InputReport r) {
    explored += r.nodes;
    if (r.verdict == Verdict::Pass) ++pass;
    if (r.verdict == Verdict::Fail) ++fail;
    if (r.verdict == Verdict::Inconclusive) ++inconclusive;
    rows.push_back(std::move(r));
}

json Report::to_json() const {
    json rs = json::array();
    for (const auto& r : rows) {
        json j{{"input", r.input}, {"expected", r.expected}, {"verdict", verdict_name(r.verdict)}, {"nodes", r.nodes}};
        if (r.verdict == Verdict::Fail) {
            j["witness"] = r.trace;
            j["bad_config"] = r.bad_config;
            j["bad_output"] = r.bad_output == kBottom ? json(nullptr) : json(r.bad_output);
        }
        rs.push_back(std::move(j));
    }
    return json{{"rows", rs}, {"pass", pass}, {"fail", fail}, {"inconclusive", inconclusive}, {"explored", explored}};
}

InputReport check_input(Machine& m, const Valuation& v, int expected, std::size_t node_cap) {
    InputReport r;
    r.input = v;
    r.expected = expected;
    ReachGraph g = explore(m, m.initial(v), node_cap);
    r.nodes = g.size();
    if (g.truncated) {
        r.verdict = Verdict::Inconclusive;
        return r;
    }
    SccResult s = tarjan(g);
    for (std::uint32_t i = 0; i < g.size(); ++i) {
        if (!s.bottom[s.comp[i]]) continue;
        int o = m.config_output(g.nodes[i]);
        if (o != expected) {
            r.verdict = Verdict::Fail;
            r.trace = witness(m, g, i);
            r.bad_config = m.render(g.nodes[i]);
            r.bad_output = o;
            break;
        }
    }
    return r;
}

Report check_computes(const MachineFactory& make, const Expectation& expected, const std::vector<Valuation>& inputs,
                      std::size_t node_cap, int jobs) {
    std::vector<InputReport> rows(inputs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        MachinePtr m = make();
        for (std::size_t i; (i = next++) < inputs.size();) rows[i] = check_input(*m, inputs[i], expected(inputs[i]), node_cap);
    };
    const int n = std::max(1, std::min<int>(jobs, static_cast<int>(inputs.size())));
    if (n == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < n; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    Report rep;
    for (auto& r : rows) rep.add(std::move(r));
    return rep;
}

std::vector<Valuation> inputs_between(const std::vector<std::string>& vars, int lo, int hi) {
    std::vector<Valuation> out;
    Valuation cur;
    std::function<void(std::size_t, int)> rec = [&](std::size_t i, int left) {
        if (i + 1 == vars.size()) {
            cur[vars[i]] = left;
            out.push_back(cur);
            return;
        }
        for (int k = left; k >= 0; --k) {
            cur[vars[i]] = k;
            rec(i + 1, left - k);
        }
    };
    if (vars.empty()) return out;
    for (int total = std::max(0, lo); total <= hi; ++total) rec(0, total);
    return out;
}

Expectation guarded(const Formula& phi, const std::string& guard) {
    auto size = [](const Valuation& v) {
        std::int64_t s = 0;
        for (const auto& [x, n] : v) s += n;
        return s;
    };
    if (guard.empty() || guard == "none") return [phi](const Valuation& v) { return int(evaluate(phi, v)); };
    auto colon = guard.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("guard must be none, ge:l or lt:l");
    std::string kind = guard.substr(0, colon);
    std::int64_t ell = std::stoll(guard.substr(colon + 1));
    if (kind == "ge")
        return [=](const Valuation& v) { return size(v) >= ell ? int(evaluate(phi, v)) : 1; };
    if (kind == "lt")
        return [=](const Valuation& v) { return size(v) < ell ? int(evaluate(phi, v)) : 1; };
    throw std::invalid_argument("guard must be none, ge:l or lt:l");
}

json HaltingReport::to_json() const {
    return json{{"inputs", inputs}, {"nodes", nodes}, {"truncated", truncated}, {"violations", violations},
                {"ok", ok()}};
}

HaltingReport check_halting(Machine& m, const std::vector<Valuation>& inputs, std::size_t node_cap) {
    HaltingReport r;
    auto counts = [&](const Config& c) {
        std::pair<std::uint64_t, std::uint64_t> fc{0, 0};
        for (const auto& [s, n] : c) {
            int o = m.output(s);
            if (o == 0) fc.first += n;
            if (o == 1) fc.second += n;
        }
        return fc;
    };
    for (const auto& v : inputs) {
        ++r.inputs;
        ReachGraph g = explore(m, m.initial(v), node_cap);
        r.nodes += g.size();
        r.truncated |= g.truncated;
        for (std::uint32_t i = 0; i < g.size(); ++i) {
            auto [f, t] = counts(g.nodes[i]);
            if (f > 0 && t > 0) {
                r.violations.push_back("f and t both occupied in " + m.render(g.nodes[i]));
                break;
            }
            for (auto e = g.offsets[i]; e < g.offsets[i + 1]; ++e) {
                auto [f2, t2] = counts(g.nodes[g.targets[e]]);
                if (f2 < f || t2 < t) {
                    r.violations.push_back("occupancy drops along " + m.label(g.labels[e]) + " from " +
                                           m.render(g.nodes[i]));
                    break;
                }
            }
            if (r.violations.size() > 16) return r;
        }
    }
    return r;
}

json RdiReport::to_json() const {
    return json{{"init_nodes", init_nodes},
                {"computation_nodes", computation_nodes},
                {"samples", samples},
                {"input_bound", input_bound_ok()},
                {"reversibility", reversibility_ok()},
                {"computation", computation_ok()},
                {"input_bound_violations", input_bound_violations},
                {"reversibility_failures", reversibility_failures},
                {"computation_failures", computation_failures},
                {"truncated", truncated},
                {"details", details}};
}

RdiReport check_rdi(const RDIProtocol& rdi, const Expectation& phi, const RdiOptions& opt) {
    RdiReport rep;
    const Protocol& p = rdi.base;
    const Sid nq = static_cast<Sid>(p.states.size());
    ExplicitMachine full(rdi.with_dagger());
    ExplicitMachine perm(p);

    auto split = [&](const Config& c) {
        std::pair<Config, Config> r;
        for (const auto& e : c) (e.first < nq ? r.first : r.second).push_back(e);
        return r;
    };
    auto effective = [&](const Config& w) {
        Valuation v;
        for (const auto& x : p.vars) v[x] = 0;
        for (const auto& [s, n] : w) v[p.vars[s - nq]] = n;
        return v;
    };
    std::vector<std::uint32_t> in_label, out_label;
    for (const auto& x : p.vars) {
        in_label.push_back(full.label_id("in_" + x));
        out_label.push_back(full.label_id("out_" + x));
    }

    // Initialization graph over (C, w); w is encoded as pseudo-states nq + var.
    std::vector<Step> inner;
    Successors init_succ = [&](const Config& cw, std::vector<Step>& out) {
        out.clear();
        auto [c, w] = split(cw);
        if (ms_size(c) >= 2) {
            full.steps(c, inner);
            for (auto& s : inner) out.push_back(Step{ms_add(s.next, w), s.label});
        }
        for (std::size_t x = 0; x < p.vars.size(); ++x) {
            const Sid in = p.inputs[x], ws = nq + static_cast<Sid>(x);
            if (static_cast<int>(ms_size(w)) < opt.max_pop)
                out.push_back(Step{ms_add(cw, ms_of({in, ws})), in_label[x]});
            if (ms_count(c, in) > 0 && ms_count(w, ws) > 0)
                out.push_back(Step{ms_sub(cw, ms_of({in, ws})), out_label[x]});
        }
    };
    ReachGraph init = bfs({p.leaders}, init_succ, opt.node_cap, opt.max_depth);
    rep.init_nodes = init.size();
    rep.truncated |= init.truncated && opt.max_depth == 0;

    for (const auto& cw : init.nodes) {
        auto [c, w] = split(cw);
        for (std::size_t x = 0; x < p.vars.size(); ++x)
            if (ms_count(c, p.inputs[x]) > ms_count(w, nq + static_cast<Sid>(x))) {
                ++rep.input_bound_violations;
                if (rep.details.size() < 8) rep.details.push_back("input bound violated at " + full.render(c));
            }
    }

    // Post-initialization: T-infinity only, from every configuration met during initialization.
    std::vector<Config> roots;
    for (const auto& cw : init.nodes) {
        auto c = split(cw).first;
        if (ms_size(c) >= 2) roots.push_back(c);
    }
    ReachGraph comp = bfs(roots, [&](const Config& c, std::vector<Step>& out) { perm.steps(c, out); }, opt.node_cap);
    rep.computation_nodes = comp.size();
    rep.truncated |= comp.truncated;
    if (!comp.truncated) {
        SccResult s = tarjan(comp);
        std::vector<std::vector<std::uint32_t>> members(s.count);
        for (std::uint32_t i = 0; i < comp.size(); ++i) members[s.comp[i]].push_back(i);
        std::vector<int> mask(s.count, 0);
        for (std::uint32_t c = 0; c < s.count; ++c) {
            if (s.bottom[c]) {
                int v = bottom_value(perm, comp, members[c]);
                mask[c] = 1 << (v == 2 ? 2 : v);
                continue;
            }
            for (auto i : members[c])
                for (auto e = comp.offsets[i]; e < comp.offsets[i + 1]; ++e)
                    if (s.comp[comp.targets[e]] != c) mask[c] |= mask[s.comp[comp.targets[e]]];
        }
        NodeIndex idx(comp.nodes);
        for (std::uint32_t i = 0; i < comp.size(); ++i) idx.insert(i);
        for (const auto& cw : init.nodes) {
            auto [c, w] = split(cw);
            if (ms_size(c) < 2) continue;
            int want = 1 << phi(effective(w));
            int got = mask[s.comp[idx.find(c)]];
            if (got != want) {
                ++rep.computation_failures;
                if (rep.details.size() < 8)
                    rep.details.push_back("computation from " + full.render(c) + " reaches outcome mask " +
                                          std::to_string(got) + ", expected " + std::to_string(want));
            }
        }
    }

    // Reversibility: D' in [D] must get back to some C' in [C].
    const Sid f = p.at("f"), t = p.at("t");
    auto strip = [&](const Config& c) {
        Config r;
        for (const auto& e : c)
            if (e.first != f && e.first != t) r.push_back(e);
        return r;
    };
    std::mt19937_64 rng(opt.seed);
    std::vector<std::uint32_t> candidates;
    for (std::uint32_t i = 0; i < init.size(); ++i)
        if (ms_size(split(init.nodes[i]).first) >= 2) candidates.push_back(i);
    auto tsucc = [&](const Config& c, std::vector<Step>& out) { full.steps(c, out); };
    for (int k = 0; k < opt.samples && !candidates.empty(); ++k) {
        std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
        Config c = split(init.nodes[candidates[pick(rng)]]).first;
        ReachGraph fwd = bfs({c}, tsucc, opt.node_cap);
        if (fwd.truncated) {
            rep.truncated = true;
            break;
        }
        std::uniform_int_distribution<std::size_t> pd(0, fwd.size() - 1);
        Config d = fwd.nodes[pd(rng)];
        const Config target = strip(c);
        const std::uint32_t bools = ms_count(d, f) + ms_count(d, t);
        ++rep.samples;
        for (std::uint32_t j = 0; j <= bools; ++j) {
            Config dp = strip(d);
            if (bools - j) ms_insert(dp, f, bools - j);
            if (j) ms_insert(dp, t, j);
            ReachGraph back = bfs({dp}, tsucc, opt.node_cap);
            bool found = std::any_of(back.nodes.begin(), back.nodes.end(),
                                     [&](const Config& x) { return strip(x) == target; });
            if (back.truncated) rep.truncated = true;
            if (!found) {
                ++rep.reversibility_failures;
                if (rep.details.size() < 8)
                    rep.details.push_back("no return from " + full.render(dp) + " to the class of " + full.render(c));
            }
        }
    }
    return rep;
}

json SimResult::to_json() const {
    return json{{"outcome", stabilized ? "stabilized" : "undecided"},
                {"output", output == kBottom ? json(nullptr) : json(output)},
                {"steps", steps},
                {"final", final_config}};
}

SimResult simulate(Machine& m, const Valuation& v, std::uint64_t seed, std::uint64_t max_steps, std::uint64_t window) {
    std::mt19937_64 rng(seed);
    SimResult r;
    Config c = m.initial(v);
    std::vector<Step> steps;
    int last = m.config_output(c);
    std::uint64_t run = 0;
    for (; r.steps < max_steps; ++r.steps) {
        m.steps(c, steps);
        if (steps.empty()) {
            if (last != kBottom) {
                r.stabilized = true;
                r.output = last;
            }
            break;
        }
        std::uniform_int_distribution<std::size_t> pick(0, steps.size() - 1);
        c = std::move(steps[pick(rng)].next);
        int o = m.config_output(c);
        run = (o == last) ? run + 1 : 0;
        last = o;
        if (o != kBottom && run >= window) {
            r.stabilized = true;
            r.output = o;
            ++r.steps;
            break;
        }
    }
    r.final_config = m.render(c);
    return r;
}

}  // namespace ppf
