#include "ppf/machine.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <set>

namespace ppf {

std::uint32_t Machine::label_id(const std::string& s) {
    auto it = label_index_.find(s);
    if (it != label_index_.end()) return it->second;
    auto id = static_cast<std::uint32_t>(labels_.size());
    labels_.push_back(s);
    label_index_.emplace(s, id);
    return id;
}

Config Machine::initial(const Valuation& v) {
    Config c = leaders();
    for (const auto& [x, n] : v) {
        if (n == 0) continue;
        if (n < 0) throw std::invalid_argument("negative input for '" + x + "'");
        auto it = std::find(vars.begin(), vars.end(), x);
        if (it == vars.end()) throw std::invalid_argument("unknown variable '" + x + "'");
        ms_insert(c, input(static_cast<std::size_t>(it - vars.begin())), static_cast<std::uint32_t>(n));
    }
    if (ms_size(c) < 2) throw std::invalid_argument("population size must be at least 2");
    return c;
}

int Machine::config_output(const Config& c) {
    bool zero = false, one = false;
    for (const auto& [s, n] : c) {
        int o = output(s);
        zero |= o == 0;
        one |= o == 1;
    }
    if (zero == one) return kBottom;
    return one ? 1 : 0;
}

void Machine::steps(const Config& c, std::vector<Step>& out) {
    out.clear();
    const std::size_t w = width();
    Multiset pre;
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t from, std::size_t size) {
        if (size > 0) {
            for (const auto& r : react(pre)) {
                Config d = ms_add(ms_sub(c, pre), r.post);
                out.push_back(Step{std::move(d), r.label});
            }
        }
        if (size == w) return;
        for (std::size_t i = from; i < c.size(); ++i) {
            const auto [s, n] = c[i];
            std::uint32_t used = (!pre.empty() && pre.back().first == s) ? pre.back().second : 0;
            if (used >= n) continue;
            if (used)
                ++pre.back().second;
            else
                pre.emplace_back(s, 1);
            rec(i, size + 1);
            if (used)
                --pre.back().second;
            else
                pre.pop_back();
        }
    };
    rec(0, 0);
    std::stable_sort(out.begin(), out.end(), [](const Step& a, const Step& b) { return a.next < b.next; });
    out.erase(std::unique(out.begin(), out.end(), [](const Step& a, const Step& b) { return a.next == b.next; }),
              out.end());
}

std::string Machine::render(const Config& c) {
    std::string s = "{";
    bool first = true;
    for (const auto& [q, n] : c) {
        if (!first) s += ", ";
        first = false;
        if (n > 1) s += std::to_string(n) + "*";
        s += name(q);
    }
    return s + "}";
}

ExplicitMachine::ExplicitMachine(Protocol p) : p_(std::move(p)), width_(std::max<std::size_t>(1, p_.width())) {
    vars = p_.vars;
    flavor = p_.flavor;
    for (const auto& t : p_.transitions) {
        if (t.pre == t.post) continue;
        auto& rs = index_[t.pre];
        bool dup = std::any_of(rs.begin(), rs.end(), [&](const Reaction& r) { return r.post == t.post; });
        if (!dup) rs.push_back(Reaction{t.post, label_id(t.label)});
    }
}

const std::vector<Reaction>& ExplicitMachine::react(const Multiset& pre) {
    auto it = index_.find(pre);
    return it == index_.end() ? none_ : it->second;
}

std::size_t KeyHash::operator()(const Key& k) const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (auto v : k) {
        h ^= static_cast<std::uint32_t>(v);
        h *= 1099511628211ull;
    }
    return h;
}

Sid RuleMachine::intern(const Key& k) {
    auto it = index_.find(k);
    if (it != index_.end()) return it->second;
    Sid id = static_cast<Sid>(keys_.size());
    keys_.push_back(k);
    index_.emplace(k, id);
    outputs_.push_back(key_output(k));
    return id;
}

void RuleMachine::emit(std::vector<Reaction>& out, std::vector<Sid> post, const std::string& label) {
    out.push_back(Reaction{ms_of(std::move(post)), label_id(label)});
}

const std::vector<Reaction>& RuleMachine::react(const Multiset& pre) {
    auto it = cache_.find(pre);
    if (it != cache_.end()) return it->second;
    std::vector<Reaction> rs;
    compute(ms_items(pre), rs);
    std::vector<Reaction> kept;
    for (auto& r : rs) {
        if (r.post == pre) continue;
        bool dup = std::any_of(kept.begin(), kept.end(), [&](const Reaction& k) { return k.post == r.post; });
        if (!dup) kept.push_back(std::move(r));
    }
    return cache_.emplace(pre, std::move(kept)).first->second;
}

std::optional<Protocol> materialize(Machine& m, const MaterializeLimits& lim) {
    Protocol p;
    std::vector<Sid> order;  // machine ids in discovery order
    std::unordered_map<Sid, Sid> local;
    std::deque<Sid> work;
    auto see = [&](Sid s) {
        if (local.count(s)) return;
        local.emplace(s, static_cast<Sid>(order.size()));
        order.push_back(s);
        work.push_back(s);
    };
    auto translate = [&](const Multiset& ms) {
        Multiset r;
        for (const auto& [s, n] : ms) ms_insert(r, local.at(s), n);
        return r;
    };
    std::vector<Sid> inputs;
    for (std::size_t i = 0; i < m.vars.size(); ++i) {
        inputs.push_back(m.input(i));
        see(inputs.back());
    }
    Multiset leaders = m.leaders();
    for (const auto& [s, n] : leaders) see(s);

    const std::size_t w = m.width();
    std::vector<Sid> done;
    std::set<std::pair<Multiset, Multiset>> seen;
    while (!work.empty()) {
        Sid s = work.front();
        work.pop_front();
        done.push_back(s);
        // every multiset of size <= w over `done` that contains s
        std::vector<Sid> pick{s};
        std::function<bool(std::size_t)> rec = [&](std::size_t from) -> bool {
            Multiset pre = ms_of(pick);
            for (const auto& r : m.react(pre)) {
                for (const auto& [q, n] : r.post) see(q);
                if (seen.emplace(pre, r.post).second) {
                    Transition t{pre, r.post, m.label(r.label)};
                    p.transitions.push_back(std::move(t));
                    if (p.transitions.size() > lim.max_transitions) return false;
                }
            }
            if (order.size() > lim.max_states) return false;
            if (pick.size() == w) return true;
            for (std::size_t i = from; i < done.size(); ++i) {
                pick.push_back(done[i]);
                bool ok = rec(i);
                pick.pop_back();
                if (!ok) return false;
            }
            return true;
        };
        if (!rec(0)) return std::nullopt;
    }
    for (Sid s : order) p.add_state(m.name(s), m.output(s));
    for (auto& t : p.transitions) {
        t.pre = translate(t.pre);
        t.post = translate(t.post);
    }
    for (std::size_t i = 0; i < m.vars.size(); ++i) p.add_var(m.vars[i], local.at(inputs[i]));
    p.leaders = translate(leaders);
    p.flavor = m.flavor;
    return p;
}

}  // namespace ppf
