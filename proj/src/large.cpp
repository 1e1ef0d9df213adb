#include "ppf/large.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace ppf {

namespace {

std::int64_t iabs(std::int64_t v) { return v < 0 ? -v : v; }

std::vector<std::string> repeat(const std::string& s, std::size_t n) { return std::vector<std::string>(n, s); }

std::vector<std::string> cat(std::vector<std::string> a, const std::vector<std::string>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

std::string tagged(const std::string& q, const std::string& x) { return q + "_" + x; }

int bits_for(std::int64_t norm) { return bit_length(static_cast<std::uint64_t>(norm)); }

}  // namespace

std::vector<std::string> canonical_rep(std::int64_t d, int n, bool sign) {
    if (d == 0) return {"0"};
    const std::uint64_t mag = static_cast<std::uint64_t>(iabs(d));
    if (n < 0 || n >= 62 || mag >= (std::uint64_t{1} << (n + 1)))
        throw std::out_of_range("value " + std::to_string(d) + " does not fit in 2^0..2^" + std::to_string(n));
    std::vector<std::string> r;
    for (int i = n; i >= 0; --i)
        if (mag >> i & 1) r.push_back((sign ? (d > 0 ? "+" : "-") : "") + std::to_string(std::uint64_t{1} << i));
    return r;
}

int rdi_bits(const Atom& a) {
    std::int64_t norm = std::max(iabs(a.bound), a.modulus);
    for (const auto& [x, c] : a.coeffs) norm = std::max(norm, iabs(c));
    return bits_for(norm);
}

RDIProtocol build_threshold_rdi(const Coeffs& a, std::int64_t b, const std::vector<std::string>& vars) {
    if (b <= 0) throw std::invalid_argument("threshold RDI needs a positive bound");
    std::int64_t norm = b;
    for (const auto& [x, c] : a) {
        if (std::find(vars.begin(), vars.end(), x) == vars.end())
            throw std::invalid_argument("coefficient for unknown variable " + x);
        norm = std::max(norm, iabs(c));
    }
    const int n = bits_for(norm);

    RDIProtocol r;
    Protocol& p = r.base;
    p.flavor = Flavor::Simple;
    for (const auto& x : vars) p.add_var(x, p.add_state(x));
    std::vector<std::string> nums{"0"};
    for (int i = 0; i <= n; ++i) {
        nums.push_back("+" + std::to_string(std::int64_t{1} << i));
        nums.push_back("-" + std::to_string(std::int64_t{1} << i));
    }
    for (const auto& q : nums) p.add_state(q);
    for (const auto& x : vars)
        for (const auto& q : nums) p.add_state(tagged(q, x));
    p.add_state("f", 0);
    p.add_state("t", 1);
    ms_insert(p.leaders, p.at("0"), static_cast<std::uint32_t>(2 * n));
    ms_insert(p.leaders, p.at("f"));

    auto pw = [](char s, int i) { return std::string(1, s) + std::to_string(std::int64_t{1} << i); };
    auto& dag = r.dagger;
    auto add_dagger = [&](const std::vector<std::string>& pre, const std::vector<std::string>& post,
                          const std::string& label) {
        std::vector<Sid> x, y;
        for (const auto& s : pre) x.push_back(p.at(s));
        for (const auto& s : post) y.push_back(p.at(s));
        dag.push_back(Transition{ms_of(x), ms_of(y), label});
    };

    for (const auto& x : vars) {
        auto it = a.find(x);
        auto rep = canonical_rep(it == a.end() ? 0 : it->second, n);
        p.add(cat({x}, repeat("0", rep.size())), cat({tagged("0", x)}, rep), "add_" + x);
        for (const char* q : {"f", "t"})
            add_dagger(cat({tagged("0", x), q}, rep), cat({x, "f"}, repeat("0", rep.size())),
                       std::string("add-1_") + x + "_" + q);
    }
    for (char s : {'+', '-'}) {
        for (int i = 0; i < n; ++i)
            p.add({pw(s, i), pw(s, i)}, {pw(s, i + 1), "0"}, "up_" + std::to_string(i) + s);
        for (int i = 1; i <= n; ++i)
            p.add({pw(s, i), "0"}, {pw(s, i - 1), pw(s, i - 1)}, "down_" + std::to_string(i) + s);
    }
    for (int i = 0; i <= n; ++i)
        for (const char* q : {"f", "t"}) {
            p.add({pw('+', i), pw('-', i), q}, {"0", "0", "f"}, "cancel_" + std::to_string(i) + "_" + q);
            add_dagger({"0", "0", q}, {pw('+', i), pw('-', i), "f"}, "cancel-1_" + std::to_string(i) + "_" + q);
        }
    for (const auto& x : vars)
        for (const auto& u : nums)
            for (const auto& v : nums)
                if (u != v) p.add({u, tagged(v, x)}, {tagged(u, x), v}, "swap_" + x + "_" + u + "_" + v);
    auto rb = canonical_rep(b, n);
    p.add(cat(rb, {"f"}), cat(rb, {"t"}), "equal");
    p.add(std::vector<std::string>{"f", "t"}, {"f", "f"}, "false");
    add_dagger({"t"}, {"f"}, "reset");
    return r;
}

RDIProtocol build_remainder_rdi(const Coeffs& a, std::int64_t b, std::int64_t m, const std::vector<std::string>& vars) {
    if (m < 2) throw std::invalid_argument("modulus must be at least 2");
    if (b <= 0 || b >= m) throw std::invalid_argument("remainder RDI needs 0 < b < m");
    for (const auto& [x, c] : a) {
        if (c < 0 || c >= m) throw std::invalid_argument("remainder coefficients must lie in [0, m)");
        if (std::find(vars.begin(), vars.end(), x) == vars.end())
            throw std::invalid_argument("coefficient for unknown variable " + x);
    }
    const int n = bits_for(m);

    RDIProtocol r;
    Protocol& p = r.base;
    p.flavor = Flavor::Simple;
    for (const auto& x : vars) p.add_var(x, p.add_state(x));
    std::vector<std::string> nums{"0"};
    for (int i = 0; i <= n; ++i) nums.push_back(std::to_string(std::int64_t{1} << i));
    for (const auto& q : nums) p.add_state(q);
    for (const auto& x : vars)
        for (const auto& q : nums) p.add_state(tagged(q, x));
    p.add_state("f", 0);
    p.add_state("t", 1);
    ms_insert(p.leaders, p.at("0"), static_cast<std::uint32_t>(2 * n));
    ms_insert(p.leaders, p.at("f"));

    auto pw = [](int i) { return std::to_string(std::int64_t{1} << i); };
    auto add_dagger = [&](const std::vector<std::string>& pre, const std::vector<std::string>& post,
                          const std::string& label) {
        std::vector<Sid> x, y;
        for (const auto& s : pre) x.push_back(p.at(s));
        for (const auto& s : post) y.push_back(p.at(s));
        r.dagger.push_back(Transition{ms_of(x), ms_of(y), label});
    };

    for (const auto& x : vars) {
        auto it = a.find(x);
        auto rep = canonical_rep(it == a.end() ? 0 : it->second, n, false);
        p.add(cat({x}, repeat("0", rep.size())), cat({tagged("0", x)}, rep), "add_" + x);
        for (const char* q : {"f", "t"})
            add_dagger(cat({tagged("0", x), q}, rep), cat({x, "f"}, repeat("0", rep.size())),
                       std::string("add-1_") + x + "_" + q);
    }
    for (int i = 0; i < n; ++i) p.add({pw(i), pw(i)}, {pw(i + 1), "0"}, "up_" + std::to_string(i));
    for (int i = 1; i <= n; ++i) p.add({pw(i), "0"}, {pw(i - 1), pw(i - 1)}, "down_" + std::to_string(i));
    auto rm = canonical_rep(m, n, false);
    for (const char* q : {"f", "t"}) {
        p.add(cat(rm, {q}), cat(repeat("0", rm.size()), {"f"}), std::string("modulo_") + q);
        add_dagger(cat(repeat("0", rm.size()), {q}), cat(rm, {"f"}), std::string("modulo-1_") + q);
    }
    for (const auto& x : vars)
        for (const auto& u : nums)
            for (const auto& v : nums)
                if (u != v) p.add({u, tagged(v, x)}, {tagged(u, x), v}, "swap_" + x + "_" + u + "_" + v);
    auto rb = canonical_rep(b, n, false);
    p.add(cat(rb, {"f"}), cat(rb, {"t"}), "equal");
    p.add(std::vector<std::string>{"f", "t"}, {"f", "f"}, "false");
    add_dagger({"t"}, {"f"}, "reset");
    return r;
}

RDIProtocol build_rdi(const Atom& a, const std::vector<std::string>& vars) {
    if (a.kind == AtomKind::AtLeast) return build_threshold_rdi(a.coeffs, a.bound, vars);
    if (a.kind == AtomKind::ModAtLeast) return build_remainder_rdi(a.coeffs, a.bound, a.modulus, vars);
    throw std::invalid_argument("atom is not normalized: " + to_string(a));
}

std::string hi_var(const std::string& x) { return x + ".hi"; }
std::string lo_var(const std::string& x) { return x + ".lo"; }

std::vector<std::string> tilde_vars(const std::vector<std::string>& vars) {
    std::vector<std::string> r;
    for (const auto& x : vars) {
        r.push_back(hi_var(x));
        r.push_back(lo_var(x));
    }
    return r;
}

Atom tilde_transform(const Atom& a, std::int64_t k) {
    Atom r = a;
    r.coeffs.clear();
    for (const auto& [x, c] : a.coeffs) {
        std::int64_t hi = k * c;
        if (a.kind == AtomKind::ModAtLeast || a.kind == AtomKind::Congruent) hi = floor_mod(hi, a.modulus);
        r.coeffs[hi_var(x)] = hi;
        r.coeffs[lo_var(x)] = c;
    }
    return r;
}

MultiOutputProtocol combine_multi_output(const std::vector<RDIProtocol>& rdis, const std::vector<std::string>& vars,
                                         std::size_t k) {
    if (k < 2 || rdis.size() != k) throw std::invalid_argument("dispatch needs k >= 2 protocols");
    MultiOutputProtocol mop;
    Protocol& p = mop.base;
    p.flavor = Flavor::Simple;
    for (const auto& x : vars) p.add_var(x, p.add_state(x));
    for (const auto& x : vars) p.add_state("h_" + x);
    std::vector<std::vector<Sid>> map(k);
    for (std::size_t i = 0; i < k; ++i) {
        const std::string prefix = "r" + std::to_string(i + 1) + ":";
        for (const auto& s : rdis[i].base.states) map[i].push_back(p.add_state(prefix + s));
        for (const auto& v : tilde_vars(vars))
            if (std::find(rdis[i].base.vars.begin(), rdis[i].base.vars.end(), v) == rdis[i].base.vars.end())
                throw std::invalid_argument("variable mismatch: " + v);
    }
    auto translate = [&](std::size_t i, const Multiset& m) {
        Multiset r;
        for (const auto& [s, n] : m) ms_insert(r, map[i][s], n);
        return r;
    };
    std::vector<Sid> guards;
    for (const auto& x : vars) guards.push_back(p.at(x));

    std::vector<Transition> dispatch;
    for (const auto& x : vars) {
        Multiset hi_post, lo_post;
        for (std::size_t i = 0; i < k; ++i) {
            ms_insert(hi_post, map[i][rdis[i].base.input_of(hi_var(x))]);
            ms_insert(lo_post, map[i][rdis[i].base.input_of(lo_var(x))]);
        }
        Multiset hi_pre, lo_pre;
        ms_insert(hi_pre, p.at(x), static_cast<std::uint32_t>(k));
        ms_insert(lo_pre, p.at(x));
        ms_insert(lo_pre, p.at("h_" + x), static_cast<std::uint32_t>(k - 1));
        dispatch.push_back(Transition{hi_pre, hi_post, "split_hi_" + x});
        dispatch.push_back(Transition{lo_pre, lo_post, "split_lo_" + x});
        ms_insert(p.leaders, p.at("h_" + x), static_cast<std::uint32_t>((k - 1) * (k - 1)));
    }
    for (const auto& t : dispatch) p.add(t.pre, t.post, t.label);
    for (const auto& t : dispatch)
        for (std::size_t g = 0; g < guards.size(); ++g) {
            Multiset gm = ms_of({guards[g]});
            p.add(ms_add(t.post, gm), ms_add(t.pre, gm), t.label + "-1@" + vars[g]);
        }
    for (std::size_t i = 0; i < k; ++i) {
        const std::string prefix = "r" + std::to_string(i + 1) + ":";
        for (const auto& t : rdis[i].base.transitions) p.add(translate(i, t.pre), translate(i, t.post), prefix + t.label);
        for (const auto& t : rdis[i].dagger)
            for (std::size_t g = 0; g < guards.size(); ++g) {
                Multiset gm = ms_of({guards[g]});
                p.add(ms_add(translate(i, t.pre), gm), ms_add(translate(i, t.post), gm),
                      prefix + t.label + "@" + vars[g]);
            }
        p.leaders = ms_add(p.leaders, translate(i, rdis[i].base.leaders));
    }
    mop.outs.assign(k, std::vector<int>(p.states.size(), kBottom));
    for (std::size_t i = 0; i < k; ++i)
        for (Sid s = 0; s < rdis[i].base.states.size(); ++s) mop.outs[i][map[i][s]] = rdis[i].base.outputs[s];
    p.outputs.assign(p.states.size(), kBottom);
    return mop;
}

Protocol boolean_combine(const MultiOutputProtocol& mop, const Node& root, const std::vector<Atom>& atom_index) {
    Protocol p = mop.base;
    p.flavor = Flavor::Simple;
    p.outputs.assign(p.states.size(), kBottom);
    struct Out {
        std::vector<Sid> by[2];
        int index = -1;
    };
    int counter = 0;
    std::function<Out(const Node&)> build = [&](const Node& n) -> Out {
        Out o;
        if (n.op == Node::Op::Leaf) {
            auto it = std::find(atom_index.begin(), atom_index.end(), n.atom);
            if (it == atom_index.end()) throw std::invalid_argument("unmapped atom " + to_string(n.atom));
            o.index = static_cast<int>(it - atom_index.begin());
            for (Sid s = 0; s < p.states.size(); ++s) {
                int v = s < mop.outs[o.index].size() ? mop.outs[o.index][s] : kBottom;
                if (v == 0 || v == 1) o.by[v].push_back(s);
            }
            return o;
        }
        Out l = build(*n.lhs);
        Out r = n.rhs ? build(*n.rhs) : Out{};
        const std::string c = "c" + std::to_string(counter++);
        Sid res[2] = {p.add_state(c + ".f"), p.add_state(c + ".t")};
        p.outputs.resize(p.states.size(), kBottom);
        ms_insert(p.leaders, res[0]);
        auto op = [&](int a, int b) {
            if (n.op == Node::Op::And) return a & b;
            if (n.op == Node::Op::Or) return a | b;
            return 1 - a;
        };
        if (n.op == Node::Op::Not || (l.index >= 0 && l.index == r.index)) {
            for (int a = 0; a < 2; ++a)
                for (Sid q : l.by[a]) {
                    int v = op(a, a);
                    p.add(ms_of({q, res[1 - v]}), ms_of({q, res[v]}), c + "_" + std::to_string(a));
                }
        } else {
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    for (Sid q : l.by[a])
                        for (Sid s : r.by[b]) {
                            int v = op(a, b);
                            p.add(ms_of({q, s, res[1 - v]}), ms_of({q, s, res[v]}),
                                  c + "_" + std::to_string(a) + std::to_string(b));
                        }
        }
        o.by[0] = {res[0]};
        o.by[1] = {res[1]};
        return o;
    };
    Out top = build(root);
    p.outputs.resize(p.states.size(), kBottom);
    for (int v = 0; v < 2; ++v)
        for (Sid s : top.by[v]) p.outputs[s] = v;
    return p;
}

Protocol kway_to_2way(const Protocol& in) {
    Protocol p;
    p.flavor = in.flavor;
    for (Sid s = 0; s < in.states.size(); ++s) p.add_state(in.states[s], in.outputs[s]);
    p.vars = in.vars;
    p.inputs = in.inputs;
    p.leaders = in.leaders;
    auto opinionated_first = [&](std::vector<Sid> v) {
        std::stable_sort(v.begin(), v.end(), [&](Sid a, Sid b) {
            bool oa = in.outputs[a] == kBottom, ob = in.outputs[b] == kBottom;
            return oa != ob ? ob : a < b;
        });
        return v;
    };
    for (std::size_t tau = 0; tau < in.transitions.size(); ++tau) {
        const Transition& t = in.transitions[tau];
        const std::size_t k = t.width();
        if (k <= 2) {
            p.transitions.push_back(t);
            continue;
        }
        auto pre = opinionated_first(ms_items(t.pre));
        auto post = opinionated_first(ms_items(t.post));
        const std::string base = "[" + std::to_string(tau) + "]";
        std::vector<Sid> g(k + 1), w(k + 1), e(k + 1);
        for (std::size_t j = 2; j <= k; ++j) {
            g[j] = p.add_state("g" + base + std::to_string(j), in.outputs[pre[0]]);
            w[j] = p.add_state("w" + base + std::to_string(j), in.outputs[pre[j - 1]]);
        }
        for (std::size_t j = 2; j < k; ++j) e[j] = p.add_state("e" + base + std::to_string(j), in.outputs[post[0]]);
        auto step = [&](Sid a, Sid b, Sid c, Sid d, const std::string& what) {
            p.add(ms_of({a, b}), ms_of({c, d}), t.label + "/" + what);
        };
        step(pre[0], pre[1], g[2], w[2], "gather2");
        step(g[2], w[2], pre[0], pre[1], "release2");
        for (std::size_t j = 2; j < k; ++j) {
            step(g[j], pre[j], g[j + 1], w[j + 1], "gather" + std::to_string(j + 1));
            step(g[j + 1], w[j + 1], g[j], pre[j], "release" + std::to_string(j + 1));
        }
        step(g[k], w[k], e[k - 1], post[k - 1], "commit" + std::to_string(k));
        for (std::size_t j = k - 1; j >= 3; --j) step(e[j], w[j], e[j - 1], post[j - 1], "commit" + std::to_string(j));
        step(e[2], w[2], post[0], post[1], "commit2");
    }
    return p;
}

std::vector<Sid> helper_order(const Protocol& p) {
    std::vector<std::pair<std::string, Sid>> named;
    for (const auto& [s, n] : p.leaders)
        for (std::uint32_t i = 0; i < n; ++i) named.emplace_back(p.states[s], s);
    std::stable_sort(named.begin(), named.end());
    std::vector<Sid> r;
    for (const auto& [name, s] : named) r.push_back(s);
    return r;
}

HelperRemovalMachine::HelperRemovalMachine(Protocol p) : p_(std::move(p)) {
    if (p_.width() > 2) throw std::invalid_argument("helper removal needs a 2-way protocol");
    helpers_ = helper_order(p_);
    if (helpers_.empty()) throw std::invalid_argument("helper removal needs at least one helper");
    vars = p_.vars;
    flavor = Flavor::General;
    for (const auto& t : p_.transitions) {
        auto& rs = inner_[t.pre];
        if (std::find(rs.begin(), rs.end(), t.post) == rs.end()) rs.push_back(t.post);
    }
}

std::optional<std::uint64_t> HelperRemovalMachine::declared_states() const {
    const std::uint64_t q = p_.states.size();
    return helpers_.size() * p_.vars.size() + q * (q + 1) / 2;
}

Sid HelperRemovalMachine::pair_state(Sid a, Sid b) {
    if (b < a) std::swap(a, b);
    return intern(Key{1, static_cast<std::int32_t>(a), static_cast<std::int32_t>(b)});
}

int HelperRemovalMachine::key_output(const Key& k) {
    if (k[0] == 0) return 1;
    return output_of(p_.outputs, ms_of({static_cast<Sid>(k[1]), static_cast<Sid>(k[2])}));
}

std::string HelperRemovalMachine::render_key(const Key& k) {
    if (k[0] == 0) return "(" + p_.vars[k[1]] + "," + std::to_string(k[2]) + ")";
    return "{" + p_.states[k[1]] + "," + p_.states[k[2]] + "}";
}

void HelperRemovalMachine::simulate(Sid a, Sid b, Sid c, Sid d, std::vector<Reaction>& out) {
    const std::vector<Sid> agents{a, b, c, d};
    std::set<std::vector<Sid>> results{agents};
    std::set<Multiset> tried;
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = i; j < 4; ++j) {
            Multiset pre = i == j ? ms_of({agents[i]}) : ms_of({agents[i], agents[j]});
            if (!tried.insert(pre).second) continue;
            auto it = inner_.find(pre);
            if (it == inner_.end()) continue;
            Multiset all = ms_of(agents);
            for (const auto& post : it->second) results.insert(ms_items(ms_add(ms_sub(all, pre), post)));
        }
    const std::uint32_t label = label_id("simul");
    for (const auto& v : results) {
        static constexpr int splits[3][4] = {{0, 1, 2, 3}, {0, 2, 1, 3}, {0, 3, 1, 2}};
        for (const auto& s : splits)
            out.push_back(Reaction{ms_of({pair_state(v[s[0]], v[s[1]]), pair_state(v[s[2]], v[s[3]])}), label});
    }
}

void HelperRemovalMachine::compute(const std::vector<Sid>& pre, std::vector<Reaction>& out) {
    if (pre.size() != 2) return;
    const Key k1 = key(pre[0]), k2 = key(pre[1]);
    const std::size_t ell = helpers_.size();
    auto h = [&](std::int32_t i) { return helpers_[static_cast<std::size_t>(i) - 1]; };
    auto in = [&](std::int32_t var) { return p_.inputs[static_cast<std::size_t>(var)]; };
    if (k1[0] == 0 && k2[0] == 0) {
        const std::int32_t i = k1[2], j = k2[2];
        if (i == j && static_cast<std::size_t>(i) < ell) {
            emit(out, {count_state(k1[1], i + 1), count_state(k2[1], i)}, "count");
            emit(out, {count_state(k1[1], i), count_state(k2[1], i + 1)}, "count");
        }
        if (static_cast<std::size_t>(i) == ell)
            emit(out, {pair_state(in(k1[1]), h(i)), pair_state(in(k2[1]), h(j))}, "init");
        if (static_cast<std::size_t>(j) == ell)
            emit(out, {pair_state(in(k2[1]), h(j)), pair_state(in(k1[1]), h(i))}, "init");
        return;
    }
    if (k1[0] != k2[0]) {
        const Key& c = k1[0] == 0 ? k1 : k2;
        Sid pair = k1[0] == 0 ? pre[1] : pre[0];
        emit(out, {pair, pair_state(in(c[1]), h(c[2]))}, "init");
        return;
    }
    simulate(static_cast<Sid>(k1[1]), static_cast<Sid>(k1[2]), static_cast<Sid>(k2[1]), static_cast<Sid>(k2[2]), out);
}

StageStat stat_of(const std::string& name, const Protocol& p) {
    return StageStat{name, p.states.size(), p.transitions.size(), ms_size(p.leaders), p.width()};
}

std::shared_ptr<HelperRemovalMachine> LargeResult::machine() const {
    return std::make_shared<HelperRemovalMachine>(two_way);
}

LargeResult compile_large(const Formula& phi) {
    LargeResult r;
    r.normalized = normalize(phi);
    for (const Atom& a : leaves(*r.normalized.root))
        if (std::find(r.atoms.begin(), r.atoms.end(), a) == r.atoms.end()) r.atoms.push_back(a);
    const std::size_t k = r.atoms.size();
    const auto& vars = phi.vars;

    MultiOutputProtocol mop;
    if (k == 1) {
        r.rdis.push_back(build_rdi(r.atoms[0], vars));
        mop.base = r.rdis[0].base;
        mop.outs = {mop.base.outputs};
    } else {
        for (const Atom& a : r.atoms)
            r.rdis.push_back(build_rdi(tilde_transform(a, static_cast<std::int64_t>(k)), tilde_vars(vars)));
        r.dispatch = combine_multi_output(r.rdis, vars, k);
        mop = *r.dispatch;
    }
    StageStat rdi{"rdi", 0, 0, 0, 0};
    for (const auto& x : r.rdis) {
        rdi.states += x.base.states.size();
        *rdi.transitions += x.base.transitions.size() + x.dagger.size();
        rdi.helpers += ms_size(x.base.leaders);
        rdi.width = std::max(rdi.width, x.with_dagger().width());
    }
    r.stats.push_back(rdi);
    r.stats.push_back(stat_of("dispatch", mop.base));

    r.combined = boolean_combine(mop, *r.normalized.root, r.atoms);
    r.stats.push_back(stat_of("boolean", r.combined));

    r.two_way = kway_to_2way(r.combined);
    auto order = helper_order(r.two_way);
    if (!order.empty())
        while (ms_size(r.two_way.leaders) < 3) ms_insert(r.two_way.leaders, order.front());
    r.ell = ms_size(r.two_way.leaders);
    r.stats.push_back(stat_of("2way", r.two_way));

    HelperRemovalMachine m(r.two_way);
    r.stats.push_back(StageStat{"helpers-removed", *m.declared_states(), std::nullopt, 0, 2});
    return r;
}

}  // namespace ppf
