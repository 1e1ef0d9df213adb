#include "ppf/protocol.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace ppf {

const char* flavor_name(Flavor f) {
    switch (f) {
        case Flavor::General: return "general";
        case Flavor::Simple: return "simple";
        case Flavor::Halting: return "halting-claimed";
        case Flavor::FullOutput: return "full-output";
    }
    return "general";
}

Flavor flavor_from(const std::string& s) {
    if (s == "simple") return Flavor::Simple;
    if (s == "halting-claimed") return Flavor::Halting;
    if (s == "full-output") return Flavor::FullOutput;
    if (s == "general") return Flavor::General;
    throw std::invalid_argument("unknown flavor '" + s + "'");
}

Sid Protocol::add_state(const std::string& name, int output) {
    auto it = index_.find(name);
    if (it != index_.end()) {
        if (output != kBottom) outputs[it->second] = output;
        return it->second;
    }
    Sid id = static_cast<Sid>(states.size());
    states.push_back(name);
    outputs.push_back(output);
    index_.emplace(name, id);
    return id;
}

std::optional<Sid> Protocol::find(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

Sid Protocol::at(const std::string& name) const {
    auto s = find(name);
    if (!s) throw std::out_of_range("no state '" + name + "'");
    return *s;
}

void Protocol::add_var(const std::string& var, Sid input) {
    vars.push_back(var);
    inputs.push_back(input);
}

Sid Protocol::input_of(const std::string& var) const {
    for (std::size_t i = 0; i < vars.size(); ++i)
        if (vars[i] == var) return inputs[i];
    throw std::out_of_range("no variable '" + var + "'");
}

void Protocol::add(const std::vector<std::string>& pre, const std::vector<std::string>& post, std::string label) {
    std::vector<Sid> a, b;
    for (const auto& s : pre) a.push_back(add_state(s));
    for (const auto& s : post) b.push_back(add_state(s));
    add(ms_of(a), ms_of(b), std::move(label));
}

void Protocol::add(Multiset pre, Multiset post, std::string label) {
    if (pre == post) return;
    transitions.push_back(Transition{std::move(pre), std::move(post), std::move(label)});
}

std::size_t Protocol::width() const {
    std::size_t w = 0;
    for (const auto& t : transitions) w = std::max(w, t.width());
    return w;
}

void Protocol::rebuild_index() {
    index_.clear();
    for (Sid i = 0; i < states.size(); ++i) index_.emplace(states[i], i);
}

Protocol RDIProtocol::with_dagger() const {
    Protocol p = base;
    for (const auto& t : dagger) p.transitions.push_back(t);
    return p;
}

int consensus(int a, int b) {
    if (a == kBottom) return b;
    if (b == kBottom) return a;
    return a == b ? a : -2;
}

int output_of(const std::vector<int>& outputs, const Config& c) {
    bool zero = false, one = false;
    for (const auto& [s, n] : c) {
        if (outputs[s] == 0) zero = true;
        if (outputs[s] == 1) one = true;
    }
    if (zero == one) return kBottom;
    return one ? 1 : 0;
}

Config initial_config(const Protocol& p, const Valuation& v) {
    Config c = p.leaders;
    for (std::size_t i = 0; i < p.vars.size(); ++i) {
        auto it = v.find(p.vars[i]);
        if (it == v.end() || it->second == 0) continue;
        if (it->second < 0) throw std::invalid_argument("negative input for '" + p.vars[i] + "'");
        ms_insert(c, p.inputs[i], static_cast<std::uint32_t>(it->second));
    }
    for (const auto& [x, n] : v)
        if (n > 0 && std::find(p.vars.begin(), p.vars.end(), x) == p.vars.end())
            throw std::invalid_argument("unknown variable '" + x + "'");
    if (ms_size(c) < 2) throw std::invalid_argument("population size must be at least 2");
    return c;
}

bool enabled(const Config& c, const Transition& t) { return ms_leq(t.pre, c); }

Config fire(const Config& c, const Transition& t) {
    if (!enabled(c, t)) throw std::logic_error("firing disabled transition " + t.label);
    return ms_add(ms_sub(c, t.pre), t.post);
}

std::vector<std::pair<std::size_t, Config>> successors(const Protocol& p, const Config& c) {
    std::vector<std::pair<std::size_t, Config>> out;
    std::set<Config> seen;
    for (std::size_t i = 0; i < p.transitions.size(); ++i) {
        const auto& t = p.transitions[i];
        if (!enabled(c, t)) continue;
        Config d = fire(c, t);
        if (d == c || !seen.insert(d).second) continue;
        out.emplace_back(i, std::move(d));
    }
    return out;
}

std::vector<std::string> validate(const Protocol& p) {
    std::vector<std::string> v;
    const std::size_t n = p.states.size();
    auto in_range = [&](const Multiset& m) {
        return std::all_of(m.begin(), m.end(), [&](const auto& e) { return e.first < n && e.second > 0; });
    };
    if (p.outputs.size() != n) v.push_back("output map size differs from state count");
    if (p.vars.size() != p.inputs.size()) v.push_back("input map is not total on X");
    for (Sid s : p.inputs)
        if (s >= n) v.push_back("input state out of range");
    if (!in_range(p.leaders)) v.push_back("leader outside Q");
    std::set<std::string> names(p.states.begin(), p.states.end());
    if (names.size() != n) v.push_back("duplicate state names");
    for (const auto& t : p.transitions) {
        if (ms_size(t.pre) != ms_size(t.post)) v.push_back("width mismatch in " + t.label);
        if (ms_size(t.pre) == 0) v.push_back("empty transition " + t.label);
        if (!in_range(t.pre) || !in_range(t.post)) v.push_back("transition outside Q: " + t.label);
        if (t.pre == t.post) v.push_back("stored identity transition " + t.label);
    }
    if (p.outputs.size() == n) {
        int zeros = 0, ones = 0, bots = 0;
        for (int o : p.outputs) {
            if (o == 0) ++zeros;
            else if (o == 1) ++ones;
            else if (o == kBottom) ++bots;
            else v.push_back("output value out of range");
        }
        if ((p.flavor == Flavor::Simple || p.flavor == Flavor::Halting) && (zeros != 1 || ones != 1))
            v.push_back("simple protocol needs exactly one 0-state and one 1-state");
        if (p.flavor == Flavor::FullOutput && bots != 0) v.push_back("full-output protocol has opinion-less states");
    }
    return v;
}

std::string config_string(const Protocol& p, const Config& c) {
    std::string s = "{";
    bool first = true;
    for (const auto& [q, n] : c) {
        if (!first) s += ", ";
        first = false;
        if (n > 1) s += std::to_string(n) + "*";
        s += p.states[q];
    }
    return s + "}";
}

}  // namespace ppf
