#include "ppf/small.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <functional>
#include <set>
#include <stdexcept>

namespace ppf {

namespace {

int bit(std::int64_t z, int pos) { return static_cast<int>((z >> (pos - 1)) & 1); }

struct GsLeader {
    int tgt, pos, met, reset;
    std::int64_t vx, vy;

    auto operator<=>(const GsLeader&) const = default;

    std::string name() const {
        return "L<" + std::to_string(tgt) + "," + std::to_string(pos) + "," + std::to_string(met) + "," +
               std::to_string(reset) + "," + std::to_string(vx) + "," + std::to_string(vy) + ">";
    }
};

std::string regular_name(int side, std::int64_t g, int flag) {
    return std::string(side == 0 ? "A" : "B") + std::to_string(g) + "." + std::to_string(flag);
}

Coeffs coeffs_over(const Atom& a, const std::vector<std::string>& vars) {
    Coeffs c;
    for (const auto& x : vars) c[x] = a.coeff(x);
    return c;
}

}  // namespace

GreaterSumShape greater_sum_shape(const Coeffs& a, std::int64_t c, int i) {
    std::int64_t max_a = 0, max_b = 0;
    for (const auto& [x, v] : a) {
        if (v > 0) max_a = std::max(max_a, v);
        if (v < 0) max_b = std::max(max_b, -v);
    }
    GreaterSumShape s;
    s.seed_x = c < 0 ? -c : 0;
    s.seed_y = c > 0 ? c : 0;
    std::int64_t top = std::max(i * max_a + s.seed_x, i * max_b + s.seed_y);
    s.m = std::max(1, bit_length(static_cast<std::uint64_t>(top)));
    return s;
}

Protocol build_greater_sum_halting(const Coeffs& a, std::int64_t c, int i, const std::vector<std::string>& vars) {
    if (i < 2) throw std::invalid_argument("Greater-Sum needs size at least 2");
    const GreaterSumShape shape = greater_sum_shape(a, c, i);
    Protocol p;
    p.flavor = Flavor::Halting;
    std::set<std::pair<int, std::int64_t>> kinds;
    for (const auto& x : vars) {
        auto it = a.find(x);
        std::int64_t v = it == a.end() ? 0 : it->second;
        int side = v < 0 ? 1 : 0;
        kinds.emplace(side, v < 0 ? -v : v);
        p.add_var(x, p.add_state(regular_name(side, v < 0 ? -v : v, 0)));
    }
    for (const auto& [side, g] : kinds) p.add_state(regular_name(side, g, 1));
    p.add_state("f", 0);
    p.add_state("t", 1);

    const GsLeader init{shape.m, 1, 0, 0, 0, 0};
    p.leaders = ms_of({p.add_state(init.name())});
    std::set<GsLeader> seen{init};
    std::deque<GsLeader> work{init};
    auto visit = [&](const GsLeader& l) {
        if (seen.insert(l).second) work.push_back(l);
    };
    while (!work.empty()) {
        GsLeader l = work.front();
        work.pop_front();
        for (const auto& [side, g] : kinds) {
            if (l.reset == 1) {
                GsLeader n = l;
                if (n.met > 0)
                    --n.met;
                else
                    n.reset = 0;
                visit(n);
                p.add({regular_name(side, g, 1), l.name()}, {regular_name(side, g, 0), n.name()}, "unset");
                continue;
            }
            GsLeader n = l;
            (side == 0 ? n.vx : n.vy) += bit(g, l.pos);
            std::string post;
            std::string label = "probe";
            if (n.met < i - 1) {
                ++n.met;
                post = n.name();
                visit(n);
            } else {
                n.vx += bit(shape.seed_x, l.pos);
                n.vy += bit(shape.seed_y, l.pos);
                if (n.pos < n.tgt) {
                    n.vx /= 2;
                    n.vy /= 2;
                    ++n.pos;
                    n.met = i - 1;
                    n.reset = 1;
                    post = n.name();
                    visit(n);
                    label = "advance";
                } else if (n.vx % 2 != n.vy % 2) {
                    post = n.vx % 2 > n.vy % 2 ? "t" : "f";
                    label = "differ";
                } else if (n.tgt > 1) {
                    n = GsLeader{l.tgt - 1, 1, i - 1, 1, 0, 0};
                    post = n.name();
                    visit(n);
                    label = "next";
                } else {
                    post = "f";
                    label = "equal";
                }
            }
            p.add({regular_name(side, g, 0), l.name()}, {regular_name(side, g, 1), post}, label);
        }
    }
    return p;
}

NegateMachine::NegateMachine(MachinePtr base) : base_(std::move(base)) {
    vars = base_->vars;
    flavor = base_->flavor;
}

int NegateMachine::output(Sid s) {
    int o = base_->output(s);
    return o == kBottom ? o : 1 - o;
}

const std::vector<Reaction>& NegateMachine::react(const Multiset& pre) {
    auto it = cache_.find(pre);
    if (it != cache_.end()) return it->second;
    std::vector<Reaction> rs;
    for (const auto& r : base_->react(pre)) rs.push_back(Reaction{r.post, label_id(base_->label(r.label))});
    return cache_.emplace(pre, std::move(rs)).first->second;
}

MachinePtr build_remainder_halting(const Coeffs& a, std::int64_t m, std::int64_t lo, std::int64_t hi, int i,
                                   const std::vector<std::string>& vars) {
    if (m <= 0) throw std::invalid_argument("modulus must be positive");
    Coeffs r;
    for (const auto& [x, v] : a) r[x] = floor_mod(v, m);
    lo = std::max<std::int64_t>(lo, 0);
    hi = std::min<std::int64_t>(hi, m - 1);
    if (lo > hi) return std::make_shared<ExplicitMachine>(build_greater_sum_halting({}, 0, i, vars));
    MachinePtr acc;
    for (int j = 0; j < i; ++j) {
        auto ge = std::make_shared<ExplicitMachine>(build_greater_sum_halting(r, j * m + lo - 1, i, vars));
        auto gt = std::make_shared<ExplicitMachine>(build_greater_sum_halting(r, j * m + hi, i, vars));
        MachinePtr term =
            std::make_shared<HaltingCombineMachine>(HaltingOp::And, ge, std::make_shared<NegateMachine>(gt));
        acc = acc ? std::make_shared<HaltingCombineMachine>(HaltingOp::Or, acc, term) : term;
    }
    return acc;
}

HaltingCombineMachine::HaltingCombineMachine(HaltingOp op, MachinePtr first, MachinePtr second)
    : op_(op), first_(std::move(first)), second_(std::move(second)) {
    if (first_->flavor != Flavor::Halting || second_->flavor != Flavor::Halting)
        throw std::invalid_argument("halting combination needs halting parts");
    if (first_->vars != second_->vars) throw std::invalid_argument("halting parts disagree on variables");
    auto l1 = ms_items(first_->leaders()), l2 = ms_items(second_->leaders());
    if (l1.size() != 1 || l2.size() != 1) throw std::invalid_argument("halting parts need exactly one leader");
    leader1_ = l1[0];
    leader2_ = l2[0];
    vars = first_->vars;
    flavor = Flavor::Halting;
}

Sid HaltingCombineMachine::input(std::size_t i) { return tagged(static_cast<int>(i), 1, first_->input(i)); }

Multiset HaltingCombineMachine::leaders() { return ms_of({tagged(static_cast<int>(vars.size()), 1, leader1_)}); }

Sid HaltingCombineMachine::start(int tag, int j) {
    if (tag == static_cast<int>(vars.size())) return tagged(tag, j, j == 1 ? leader1_ : leader2_);
    return tagged(tag, j, part(j).input(static_cast<std::size_t>(tag)));
}

std::optional<std::uint64_t> HaltingCombineMachine::declared_states() const {
    auto a = first_->declared_states(), b = second_->declared_states();
    if (!a || !b) return std::nullopt;
    const std::uint64_t y = vars.size() + 1;
    return y * (*a + *b) + 2 * y + 2;
}

int HaltingCombineMachine::tag_of(Sid s) const {
    const Key& k = key(s);
    return k[0] == 2 ? -1 : k[1];
}

int HaltingCombineMachine::key_output(const Key& k) { return k[0] == 2 ? k[1] : kBottom; }

std::string HaltingCombineMachine::render_key(const Key& k) {
    static const char* bits[] = {"f", "t"};
    if (k[0] == 2) return bits[k[1]];
    std::string tag = k[1] == static_cast<int>(vars.size()) ? "#" : vars[static_cast<std::size_t>(k[1])];
    if (k[0] == 1) return "(" + tag + "," + bits[k[2]] + ")";
    return "(" + tag + "," + std::to_string(k[2]) + ":" + part(k[2]).name(static_cast<Sid>(k[3])) + ")";
}

void HaltingCombineMachine::lift(const Reaction& r, const std::vector<int>& tags, int j, const std::string& label,
                                 std::vector<Reaction>& out) {
    std::vector<Sid> post = ms_items(r.post);
    if (post.size() != tags.size()) return;
    if (post.size() == 1) {
        emit(out, {tagged(tags[0], j, post[0])}, label);
        return;
    }
    emit(out, {tagged(tags[0], j, post[0]), tagged(tags[1], j, post[1])}, label);
    emit(out, {tagged(tags[0], j, post[1]), tagged(tags[1], j, post[0])}, label);
}

void HaltingCombineMachine::compute(const std::vector<Sid>& pre, std::vector<Reaction>& out) {
    if (pre.size() == 1) {
        const Key k = key(pre[0]);
        if (k[0] == 1) emit(out, {final_state(k[2])}, "untag");
        if (k[0] != 0) return;
        const int tag = k[1], j = k[2];
        const Sid q = static_cast<Sid>(k[3]);
        const int o = part(j).output(q);
        if (o != kBottom) {
            const bool settles = j == 2 || (op_ == HaltingOp::And ? o == 0 : o == 1);
            if (settles)
                emit(out, {final_tagged(tag, o)}, "settle");
            else
                emit(out, {start(tag, 2)}, "restart");
        }
        for (const auto& r : part(j).react(ms_of({q}))) lift(r, {tag}, j, part(j).label(r.label), out);
        return;
    }
    if (pre.size() != 2) return;
    const Key a = key(pre[0]), b = key(pre[1]);
    if (a[0] != 0 || b[0] != 0) return;
    if (a[2] == b[2]) {
        Machine& m = part(a[2]);
        for (const auto& r : m.react(ms_of({static_cast<Sid>(a[3]), static_cast<Sid>(b[3])})))
            lift(r, {a[1], b[1]}, a[2], m.label(r.label), out);
        return;
    }
    const Key& one = a[2] == 1 ? a : b;
    const Sid two = a[2] == 1 ? pre[1] : pre[0];
    emit(out, {start(one[1], 2), two}, "promote");
}

MachinePtr halting_for_size(const Formula& phi, int i) {
    std::function<MachinePtr(const Node&)> build = [&](const Node& n) -> MachinePtr {
        switch (n.op) {
            case Node::Op::Leaf: {
                const Atom& a = n.atom;
                Coeffs c = coeffs_over(a, phi.vars);
                switch (a.kind) {
                    case AtomKind::Greater:
                        return std::make_shared<ExplicitMachine>(build_greater_sum_halting(c, a.bound, i, phi.vars));
                    case AtomKind::AtLeast:
                        return std::make_shared<ExplicitMachine>(
                            build_greater_sum_halting(c, a.bound - 1, i, phi.vars));
                    case AtomKind::Congruent: {
                        std::int64_t b = floor_mod(a.bound, a.modulus);
                        return build_remainder_halting(c, a.modulus, b, b, i, phi.vars);
                    }
                    case AtomKind::ModAtLeast:
                        return build_remainder_halting(c, a.modulus, a.bound, a.modulus - 1, i, phi.vars);
                }
                throw std::logic_error("unknown atom kind");
            }
            case Node::Op::And:
                return std::make_shared<HaltingCombineMachine>(HaltingOp::And, build(*n.lhs), build(*n.rhs));
            case Node::Op::Or:
                return std::make_shared<HaltingCombineMachine>(HaltingOp::Or, build(*n.lhs), build(*n.rhs));
            case Node::Op::Not:
                return std::make_shared<NegateMachine>(build(*n.lhs));
        }
        throw std::logic_error("unknown connective");
    };
    return build(*phi.root);
}

FixedSizeMachine::FixedSizeMachine(std::map<int, MachinePtr> parts, std::size_t ell, std::vector<std::string> vs)
    : parts_(std::move(parts)), ell_(static_cast<int>(ell)) {
    vars = std::move(vs);
    flavor = Flavor::General;
    for (int i = 2; i < ell_; ++i)
        if (!parts_.count(i)) throw std::invalid_argument("missing part for size " + std::to_string(i));
    for (const auto& [i, m] : parts_) {
        if (m->vars != vars) throw std::invalid_argument("part variables differ");
        if (ms_size(m->leaders()) > 1) throw std::invalid_argument("parts may have at most one leader");
    }
}

Machine* FixedSizeMachine::part(int i) {
    auto it = parts_.find(i);
    return it == parts_.end() ? nullptr : it->second.get();
}

Sid FixedSizeMachine::fresh_agent(int var, int i) {
    Machine* p = part(i);
    return agent(var, i, p ? static_cast<int>(p->input(static_cast<std::size_t>(var))) : -1);
}

std::optional<std::uint64_t> FixedSizeMachine::declared_states() const {
    std::uint64_t sum = 0;
    std::uint64_t n = 0;
    for (int c = 0; c <= ell_; ++c) {
        std::uint64_t q = 0;
        auto it = parts_.find(c);
        if (it != parts_.end()) {
            auto d = it->second->declared_states();
            if (!d) return std::nullopt;
            q = *d;
            sum += q;
        }
        n += 2 * static_cast<std::uint64_t>(c + 1) * (q + 1);
    }
    const std::uint64_t x = vars.size();
    return x + x * (sum + 1) + 1 + n;
}

int FixedSizeMachine::key_output(const Key& k) {
    switch (k[0]) {
        case 0: return 0;
        case 1: return k[3] < 0 ? kBottom : part(k[2])->output(static_cast<Sid>(k[3]));
        case 2: return 1;
        default: return k[2];
    }
}

std::string FixedSizeMachine::render_key(const Key& k) {
    switch (k[0]) {
        case 0: return "new(" + vars[static_cast<std::size_t>(k[1])] + ")";
        case 1:
            return "(" + vars[static_cast<std::size_t>(k[1])] + "," + std::to_string(k[2]) + "," +
                   (k[3] < 0 ? std::string("-") : part(k[2])->name(static_cast<Sid>(k[3]))) + ")";
        case 2: return "T";
        default:
            return "L(" + std::to_string(k[1]) + "," + std::to_string(k[2]) + "," + std::to_string(k[3]) + "," +
                   (k[4] < 0 ? std::string("-") : part(k[1])->name(static_cast<Sid>(k[4]))) + ")";
    }
}

void FixedSizeMachine::pair_rules(Sid a, Sid l, std::vector<Reaction>& out) {
    const Key ka = key(a), kl = key(l);
    if (kl[0] != 3 || kl[1] >= ell_) return;
    const int c = kl[1], b = kl[2], k = kl[3], pl = kl[4];
    if (ka[0] == 0) {
        const int n = c + 1;
        if (n < ell_) {
            Machine* p = part(n);
            int nl = p && !p->leaders().empty() ? static_cast<int>(ms_items(p->leaders())[0]) : -1;
            emit(out, {fresh_agent(ka[1], n), leader(n, b, 1, nl)}, "incr");
        } else {
            emit(out, {agent(ka[1], ell_, -1), leader(ell_, b, 0, -1)}, "incr");
        }
        return;
    }
    if (ka[0] != 1) return;
    const int x = ka[1], i = ka[2], q = ka[3];
    if (i != c) {
        if (c >= 1 && k < c) emit(out, {fresh_agent(x, c), leader(c, b, k + 1, pl)}, "conv");
        return;
    }
    if (k != c || q < 0) return;
    Machine& p = *part(c);
    const int o = p.output(static_cast<Sid>(q));
    if (o != kBottom && o != b) emit(out, {a, leader(c, o, k, pl)}, "bool");
    if (pl < 0) return;
    for (const auto& r : p.react(ms_of({static_cast<Sid>(q), static_cast<Sid>(pl)}))) {
        std::vector<Sid> post = ms_items(r.post);
        if (post.size() != 2) continue;
        const std::string& label = p.label(r.label);
        for (int s = 0; s < 2; ++s) {
            Sid qa = post[static_cast<std::size_t>(s)], ql = post[static_cast<std::size_t>(1 - s)];
            int ol = p.output(ql);
            emit(out,
                 {agent(x, c, static_cast<int>(qa)), leader(c, ol == kBottom ? b : ol, k, static_cast<int>(ql))},
                 label);
        }
    }
}

void FixedSizeMachine::compute(const std::vector<Sid>& pre, std::vector<Reaction>& out) {
    if (pre.size() == 1) {
        const Key k = key(pre[0]);
        if (k[0] == 1 && k[3] >= 0) {
            Machine& p = *part(k[2]);
            for (const auto& r : p.react(ms_of({static_cast<Sid>(k[3])})))
                emit(out, {agent(k[1], k[2], static_cast<int>(ms_items(r.post)[0]))}, p.label(r.label));
        }
        if (k[0] == 3 && k[1] < ell_ && k[3] == k[1] && k[4] >= 0) {
            Machine& p = *part(k[1]);
            const Sid pl = static_cast<Sid>(k[4]);
            int o = p.output(pl);
            if (o != kBottom && o != k[2]) emit(out, {leader(k[1], o, k[3], k[4])}, "bool");
            for (const auto& r : p.react(ms_of({pl}))) {
                Sid nl = ms_items(r.post)[0];
                int ol = p.output(nl);
                emit(out, {leader(k[1], ol == kBottom ? k[2] : ol, k[3], static_cast<int>(nl))}, p.label(r.label));
            }
        }
        return;
    }
    if (pre.size() != 2) return;
    const Sid a = pre[0], b = pre[1];
    const Key ka = key(a), kb = key(b);
    if ((ka[0] == 2) != (kb[0] == 2)) {
        emit(out, {top(), top()}, "top");
        return;
    }
    if ((ka[0] == 3 && ka[1] == ell_) || (kb[0] == 3 && kb[1] == ell_)) {
        emit(out, {top(), top()}, "threshold");
        return;
    }
    pair_rules(a, b, out);
    pair_rules(b, a, out);
    if (ka[0] == 1 && kb[0] == 1 && ka[2] == kb[2] && ka[3] >= 0 && kb[3] >= 0) {
        Machine& p = *part(ka[2]);
        for (const auto& r : p.react(ms_of({static_cast<Sid>(ka[3]), static_cast<Sid>(kb[3])}))) {
            std::vector<Sid> post = ms_items(r.post);
            if (post.size() != 2) continue;
            for (int s = 0; s < 2; ++s)
                emit(out,
                     {agent(ka[1], ka[2], static_cast<int>(post[static_cast<std::size_t>(s)])),
                      agent(kb[1], kb[2], static_cast<int>(post[static_cast<std::size_t>(1 - s)]))},
                     p.label(r.label));
        }
    }
}

KillLeaderMachine::KillLeaderMachine(MachinePtr base, std::size_t ell)
    : base_(std::move(base)), ell_(static_cast<int>(ell)) {
    vars = base_->vars;
    flavor = Flavor::General;
    base_leaders_ = ms_items(base_->leaders());
}

Sid KillLeaderMachine::candidate(int ps, int rc, int var, Sid q, const std::vector<Sid>& ls) {
    Key k{0, ps, rc, var, static_cast<std::int32_t>(q)};
    for (Sid l : ls) k.push_back(static_cast<std::int32_t>(l));
    return intern(k);
}

Sid KillLeaderMachine::input(std::size_t i) {
    return candidate(1, 1, static_cast<int>(i), base_->input(i), base_leaders_);
}

std::optional<std::uint64_t> KillLeaderMachine::declared_states() const {
    auto d = base_->declared_states();
    if (!d) return std::nullopt;
    std::uint64_t q = *d, x = vars.size(), l = static_cast<std::uint64_t>(ell_);
    std::uint64_t pow = 1;
    for (std::size_t j = 0; j <= base_leaders_.size(); ++j) pow *= q;
    return pow * x * l * l + 2 * x * q + 1;
}

int KillLeaderMachine::key_output(const Key& k) {
    if (k[0] == 2) return 1;
    if (k[0] == 1) return base_->output(static_cast<Sid>(k[2]));
    int o = kBottom;
    for (std::size_t j = 4; j < k.size(); ++j) o = consensus(o, base_->output(static_cast<Sid>(k[j])));
    return o == -2 ? kBottom : o;
}

std::string KillLeaderMachine::render_key(const Key& k) {
    if (k[0] == 2) return "T";
    if (k[0] == 1)
        return "(" + vars[static_cast<std::size_t>(k[1])] + "," + base_->name(static_cast<Sid>(k[2])) + "," +
               (k[3] ? "on" : "off") + ")";
    std::string s = "C(" + std::to_string(k[1]) + "," + std::to_string(k[2]) + "," +
                    vars[static_cast<std::size_t>(k[3])] + "," + base_->name(static_cast<Sid>(k[4]));
    for (std::size_t j = 5; j < k.size(); ++j) s += (j == 5 ? "|" : ",") + base_->name(static_cast<Sid>(k[j]));
    return s + ")";
}

void KillLeaderMachine::internal_rules(Sid a, std::vector<Reaction>& out) {
    const Key k = key(a);
    if (k[0] == 1 && k[3] == 1) {
        for (const auto& r : base_->react(ms_of({static_cast<Sid>(k[2])})))
            emit(out, {regular(k[1], ms_items(r.post)[0], true)}, base_->label(r.label));
        return;
    }
    if (k[0] != 0 || k[1] != k[2]) return;
    std::vector<Sid> e;
    for (std::size_t j = 4; j < k.size(); ++j) e.push_back(static_cast<Sid>(k[j]));
    auto rebuild = [&](const std::vector<Sid>& ne) {
        return candidate(k[1], k[2], k[3], ne[0], std::vector<Sid>(ne.begin() + 1, ne.end()));
    };
    for (std::size_t u = 0; u < e.size(); ++u) {
        for (const auto& r : base_->react(ms_of({e[u]}))) {
            auto ne = e;
            ne[u] = ms_items(r.post)[0];
            emit(out, {rebuild(ne)}, base_->label(r.label));
        }
        for (std::size_t v = u + 1; v < e.size(); ++v) {
            for (const auto& r : base_->react(ms_of({e[u], e[v]}))) {
                std::vector<Sid> post = ms_items(r.post);
                if (post.size() != 2) continue;
                for (int s = 0; s < 2; ++s) {
                    auto ne = e;
                    ne[u] = post[static_cast<std::size_t>(s)];
                    ne[v] = post[static_cast<std::size_t>(1 - s)];
                    emit(out, {rebuild(ne)}, base_->label(r.label));
                }
            }
        }
    }
}

void KillLeaderMachine::pair_rules(Sid a, Sid b, std::vector<Reaction>& out) {
    const Key ka = key(a), kb = key(b);
    if (ka[0] != 0 || kb[0] != 1) return;
    const int ps = ka[1], rc = ka[2], x = ka[3];
    const int y = kb[1];
    const bool active = kb[3] == 1;
    const Sid qb = static_cast<Sid>(kb[2]);
    if (rc < ps) {
        if (active)
            emit(out,
                 {candidate(ps, 1, x, base_->input(static_cast<std::size_t>(x)), base_leaders_),
                  regular(y, base_->input(static_cast<std::size_t>(y)), false)},
                 "freeze");
        else {
            Key nk = ka;
            nk[2] = rc + 1;
            emit(out, {intern(nk), regular(y, qb, true)}, "activate");
        }
        return;
    }
    if (!active) return;
    std::vector<Sid> e;
    for (std::size_t j = 4; j < ka.size(); ++j) e.push_back(static_cast<Sid>(ka[j]));
    for (std::size_t u = 0; u < e.size(); ++u) {
        for (const auto& r : base_->react(ms_of({e[u], qb}))) {
            std::vector<Sid> post = ms_items(r.post);
            if (post.size() != 2) continue;
            for (int s = 0; s < 2; ++s) {
                auto ne = e;
                ne[u] = post[static_cast<std::size_t>(s)];
                emit(out,
                     {candidate(ps, rc, x, ne[0], std::vector<Sid>(ne.begin() + 1, ne.end())),
                      regular(y, post[static_cast<std::size_t>(1 - s)], true)},
                     base_->label(r.label));
            }
        }
    }
}

void KillLeaderMachine::compute(const std::vector<Sid>& pre, std::vector<Reaction>& out) {
    if (pre.size() == 1) {
        internal_rules(pre[0], out);
        return;
    }
    if (pre.size() != 2) return;
    const Sid a = pre[0], b = pre[1];
    const Key ka = key(a), kb = key(b);
    if ((ka[0] == 2) != (kb[0] == 2)) {
        emit(out, {top(), top()}, "top");
        return;
    }
    if (ka[0] == 0 && kb[0] == 0) {
        if (ka[1] + kb[1] >= ell_) {
            emit(out, {top(), top()}, "overflow");
            return;
        }
        const int ps = ka[1] + kb[1];
        for (int s = 0; s < 2; ++s) {
            const Key& w = s == 0 ? ka : kb;
            const Key& l = s == 0 ? kb : ka;
            emit(out,
                 {candidate(ps, 1, w[3], base_->input(static_cast<std::size_t>(w[3])), base_leaders_),
                  regular(l[3], base_->input(static_cast<std::size_t>(l[3])), false)},
                 "merge");
        }
        return;
    }
    pair_rules(a, b, out);
    pair_rules(b, a, out);
    if (ka[0] == 1 && kb[0] == 1 && ka[3] == 1 && kb[3] == 1) {
        for (const auto& r : base_->react(ms_of({static_cast<Sid>(ka[2]), static_cast<Sid>(kb[2])}))) {
            std::vector<Sid> post = ms_items(r.post);
            if (post.size() != 2) continue;
            for (int s = 0; s < 2; ++s)
                emit(out,
                     {regular(ka[1], post[static_cast<std::size_t>(s)], true),
                      regular(kb[1], post[static_cast<std::size_t>(1 - s)], true)},
                     base_->label(r.label));
        }
    }
}

SmallResult compile_small(const Formula& phi, std::size_t ell) {
    if (ell < 3) throw std::invalid_argument("cutoff must be at least 3");
    SmallResult r;
    r.ell = ell;
    for (int i = 2; i < static_cast<int>(ell); ++i) r.parts[i] = halting_for_size(phi, i);
    r.fixed = std::make_shared<FixedSizeMachine>(r.parts, ell, phi.vars);
    r.machine = std::make_shared<KillLeaderMachine>(r.fixed, ell);
    return r;
}

}  // namespace ppf
