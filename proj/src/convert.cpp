#include "ppf/convert.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <stdexcept>

namespace ppf {

namespace {

// All bit assignments to the agents of `items`, as lifted multisets.
template <class Lift>
std::set<Multiset> assignments(const std::vector<Sid>& items, Lift lift) {
    std::set<Multiset> r;
    const std::size_t w = items.size();
    for (std::uint32_t mask = 0; mask < (1u << w); ++mask) {
        std::vector<Sid> v;
        for (std::size_t i = 0; i < w; ++i) v.push_back(lift(items[i], (mask >> i) & 1));
        r.insert(ms_of(v));
    }
    return r;
}

template <class Lift>
void lift_step(const std::vector<Sid>& pre, const std::vector<Sid>& post, Lift lift,
               const std::function<void(const Multiset&, const Multiset&)>& add) {
    const std::size_t w = pre.size();
    for (std::uint32_t mask = 0; mask < (1u << w); ++mask) {
        std::vector<Sid> lp;
        for (std::size_t i = 0; i < w; ++i) lp.push_back(lift(pre[i], (mask >> i) & 1));
        Multiset lpre = ms_of(lp);
        if (mask == 0 || mask == (1u << w) - 1) {
            std::vector<Sid> lq;
            for (Sid q : post) lq.push_back(lift(q, mask & 1));
            add(lpre, ms_of(lq));
        } else {
            for (const auto& lq : assignments(post, lift)) add(lpre, lq);
        }
    }
}

}  // namespace

Protocol spp_to_fopp(const Protocol& p) {
    Protocol r;
    r.flavor = Flavor::FullOutput;
    for (const auto& s : p.states) {
        r.add_state(s + "#0", 0);
        r.add_state(s + "#1", 1);
    }
    auto lift = [](Sid q, int bit) { return static_cast<Sid>(2 * q + bit); };
    for (std::size_t i = 0; i < p.vars.size(); ++i) r.add_var(p.vars[i], lift(p.inputs[i], 0));
    for (const auto& [s, n] : p.leaders) ms_insert(r.leaders, lift(s, 0), n);

    std::set<std::pair<Multiset, Multiset>> seen;
    auto add = [&](const std::string& label) {
        return [&r, &seen, label](const Multiset& a, const Multiset& b) {
            if (a != b && seen.emplace(a, b).second) r.add(a, b, label);
        };
    };
    for (const auto& t : p.transitions) lift_step(ms_items(t.pre), ms_items(t.post), lift, add(t.label));
    const Sid n = static_cast<Sid>(p.states.size());
    for (Sid a = 0; a < n; ++a)
        for (Sid b = a; b < n; ++b) lift_step({a, b}, {a, b}, lift, add("idle"));
    for (Sid q = 0; q < n; ++q) {
        if (p.outputs[q] == 0) r.add(ms_of({lift(q, 1)}), ms_of({lift(q, 0)}), "own_" + p.states[q]);
        if (p.outputs[q] == 1) r.add(ms_of({lift(q, 0)}), ms_of({lift(q, 1)}), "own_" + p.states[q]);
    }
    for (Sid q = 0; q < n; ++q) {
        int o = p.outputs[q];
        if (o == kBottom) continue;
        for (Sid a = 0; a < n; ++a) {
            Multiset pre = ms_of({lift(a, 1 - o), lift(q, o)});
            Multiset post = ms_of({lift(a, o), lift(q, o)});
            if (pre != post && seen.emplace(pre, post).second)
                r.add(pre, post, "spread_" + p.states[q]);
        }
    }
    return r;
}

Protocol fopp_to_spp(const Protocol& p) {
    Protocol r;
    r.flavor = Flavor::Simple;
    for (const auto& s : p.states) r.add_state(s);
    r.vars = p.vars;
    r.inputs = p.inputs;
    r.leaders = p.leaders;
    r.transitions = p.transitions;
    Sid f = r.add_state("@f", 0), t = r.add_state("@t", 1), bot = r.add_state("@bot");
    ms_insert(r.leaders, bot);
    for (Sid q = 0; q < p.states.size(); ++q) {
        int o = p.outputs[q];
        if (o == kBottom) continue;
        Sid to = o == 1 ? t : f;
        for (Sid b : {f, t, bot})
            if (b != to) r.add(ms_of({q, b}), ms_of({q, to}), "report_" + p.states[q]);
    }
    return r;
}

FullOutputMachine::FullOutputMachine(MachinePtr base) : base_(std::move(base)) {
    vars = base_->vars;
    flavor = Flavor::FullOutput;
}

Sid FullOutputMachine::input(std::size_t i) { return lift(base_->input(i), 0); }

Multiset FullOutputMachine::leaders() {
    Multiset r;
    for (const auto& [s, n] : base_->leaders()) ms_insert(r, lift(s, 0), n);
    return r;
}

std::optional<std::uint64_t> FullOutputMachine::declared_states() const {
    auto b = base_->declared_states();
    if (!b) return std::nullopt;
    return 2 * *b;
}

std::string FullOutputMachine::render_key(const Key& k) {
    return base_->name(static_cast<Sid>(k[0])) + "#" + std::to_string(k[1]);
}

void FullOutputMachine::compute(const std::vector<Sid>& pre, std::vector<Reaction>& out) {
    std::vector<Sid> base_pre;
    for (Sid s : pre) base_pre.push_back(static_cast<Sid>(key(s)[0]));
    auto lift_fn = [this](Sid q, int bit) { return lift(q, bit); };
    auto bits_of = [&](std::vector<int>& bits) {
        bits.clear();
        for (Sid s : pre) bits.push_back(key(s)[1]);
    };
    std::vector<int> bits;
    bits_of(bits);
    const bool uniform = std::all_of(bits.begin(), bits.end(), [&](int b) { return b == bits[0]; });
    Multiset bpre = ms_of(base_pre);

    auto add_post = [&](const std::vector<Sid>& post, std::uint32_t label) {
        if (uniform) {
            std::vector<Sid> lq;
            for (Sid q : post) lq.push_back(lift(q, bits[0]));
            out.push_back(Reaction{ms_of(lq), label});
        } else {
            for (const auto& lq : assignments(post, lift_fn)) out.push_back(Reaction{lq, label});
        }
    };
    for (const auto& r : base_->react(bpre)) add_post(ms_items(r.post), label_id(base_->label(r.label)));
    if (!uniform) add_post(base_pre, label_id("idle"));

    if (pre.size() == 1) {
        int o = base_->output(base_pre[0]);
        if (o != kBottom && o != bits[0]) out.push_back(Reaction{ms_of({lift(base_pre[0], o)}), label_id("own")});
    }
    if (pre.size() == 2) {
        for (int j = 0; j < 2; ++j) {
            int o = base_->output(base_pre[j]);
            if (o == kBottom || bits[j] != o || bits[1 - j] == o) continue;
            out.push_back(Reaction{ms_of({pre[j], lift(base_pre[1 - j], o)}), label_id("spread")});
        }
    }
}

ProductMachine::ProductMachine(MachinePtr a, MachinePtr b) : a_(std::move(a)), b_(std::move(b)) {
    if (ms_size(a_->leaders()) != 0 || ms_size(b_->leaders()) != 0)
        throw std::invalid_argument("product needs leaderless components");
    vars = a_->vars;
    flavor = Flavor::FullOutput;
    for (const auto& x : vars) {
        auto it = std::find(b_->vars.begin(), b_->vars.end(), x);
        if (it == b_->vars.end()) throw std::invalid_argument("variable mismatch in product: " + x);
        b_var_.push_back(static_cast<std::size_t>(it - b_->vars.begin()));
    }
    if (b_->vars.size() != vars.size()) throw std::invalid_argument("variable mismatch in product");
}

Sid ProductMachine::input(std::size_t i) {
    return intern(Key{static_cast<std::int32_t>(a_->input(i)), static_cast<std::int32_t>(b_->input(b_var_[i]))});
}

std::optional<std::uint64_t> ProductMachine::declared_states() const {
    auto x = a_->declared_states(), y = b_->declared_states();
    if (!x || !y) return std::nullopt;
    return *x * *y;
}

int ProductMachine::key_output(const Key& k) {
    int x = a_->output(static_cast<Sid>(k[0])), y = b_->output(static_cast<Sid>(k[1]));
    if (x == kBottom || y == kBottom) return kBottom;
    return x & y;
}

std::string ProductMachine::render_key(const Key& k) {
    return "<" + a_->name(static_cast<Sid>(k[0])) + " | " + b_->name(static_cast<Sid>(k[1])) + ">";
}

void ProductMachine::compute(const std::vector<Sid>& pre, std::vector<Reaction>& out) {
    const std::size_t w = pre.size();
    for (int side = 0; side < 2; ++side) {
        Machine& m = side == 0 ? *a_ : *b_;
        std::vector<Sid> mine, other;
        for (Sid s : pre) {
            mine.push_back(static_cast<Sid>(key(s)[side]));
            other.push_back(static_cast<Sid>(key(s)[1 - side]));
        }
        for (const auto& r : m.react(ms_of(mine))) {
            std::vector<Sid> post = ms_items(r.post);
            std::sort(post.begin(), post.end());
            std::uint32_t label = label_id((side == 0 ? "L:" : "R:") + m.label(r.label));
            do {
                std::vector<Sid> agents;
                for (std::size_t i = 0; i < w; ++i) {
                    Key k(2);
                    k[side] = static_cast<std::int32_t>(post[i]);
                    k[1 - side] = static_cast<std::int32_t>(other[i]);
                    agents.push_back(intern(k));
                }
                out.push_back(Reaction{ms_of(agents), label});
            } while (std::next_permutation(post.begin(), post.end()));
        }
    }
}

}  // namespace ppf
