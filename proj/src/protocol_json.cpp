#include <stdexcept>

#include "ppf/protocol.hpp"

namespace ppf {

using nlohmann::json;

namespace {

json ms_json(const Protocol& p, const Multiset& m) {
    json j = json::object();
    for (const auto& [s, n] : m) j[p.states[s]] = n;
    return j;
}

Multiset ms_from(const Protocol& p, const json& j) {
    Multiset m;
    for (const auto& [name, n] : j.items()) {
        auto c = n.get<std::int64_t>();
        if (c <= 0) throw std::invalid_argument("non-positive multiplicity for '" + name + "'");
        ms_insert(m, p.at(name), static_cast<std::uint32_t>(c));
    }
    return m;
}

json transition_json(const Protocol& p, const Transition& t) {
    return json{{"pre", ms_json(p, t.pre)}, {"post", ms_json(p, t.post)}, {"label", t.label}};
}

Transition transition_from(const Protocol& p, const json& j) {
    return Transition{ms_from(p, j.at("pre")), ms_from(p, j.at("post")), j.value("label", std::string{})};
}

}  // namespace

json to_json(const Protocol& p) {
    json j;
    j["states"] = p.states;
    json ts = json::array();
    for (const auto& t : p.transitions) ts.push_back(transition_json(p, t));
    j["transitions"] = std::move(ts);
    j["leaders"] = ms_json(p, p.leaders);
    j["vars"] = p.vars;
    json in = json::object();
    for (std::size_t i = 0; i < p.vars.size(); ++i) in[p.vars[i]] = p.states[p.inputs[i]];
    j["inputs"] = std::move(in);
    json out = json::object();
    for (Sid s = 0; s < p.states.size(); ++s)
        if (p.outputs[s] != kBottom) out[p.states[s]] = p.outputs[s];
    j["outputs"] = std::move(out);
    j["flavor"] = flavor_name(p.flavor);
    j["k"] = p.width();
    return j;
}

Protocol protocol_from_json(const json& j) {
    Protocol p;
    for (const auto& s : j.at("states")) {
        auto name = s.get<std::string>();
        if (p.find(name)) throw std::invalid_argument("duplicate state '" + name + "'");
        p.add_state(name);
    }
    const json outputs = j.value("outputs", json::object());
    for (const auto& [name, o] : outputs.items()) {
        int v = o.get<int>();
        if (v != 0 && v != 1) throw std::invalid_argument("output must be 0 or 1");
        p.outputs[p.at(name)] = v;
    }
    for (const auto& t : j.value("transitions", json::array())) p.transitions.push_back(transition_from(p, t));
    p.leaders = ms_from(p, j.value("leaders", json::object()));
    const json in = j.value("inputs", json::object());
    std::vector<std::string> vars;
    if (j.contains("vars"))
        vars = j.at("vars").get<std::vector<std::string>>();
    else
        for (const auto& [x, s] : in.items()) vars.push_back(x);
    for (const auto& x : vars) p.add_var(x, p.at(in.at(x).get<std::string>()));
    p.flavor = flavor_from(j.value("flavor", std::string("general")));
    return p;
}

json to_json(const RDIProtocol& p) {
    json j = to_json(p.base);
    json ds = json::array();
    for (const auto& t : p.dagger) ds.push_back(transition_json(p.base, t));
    j["dagger"] = std::move(ds);
    return j;
}

RDIProtocol rdi_from_json(const json& j) {
    RDIProtocol r;
    r.base = protocol_from_json(j);
    for (const auto& t : j.value("dagger", json::array())) r.dagger.push_back(transition_from(r.base, t));
    return r;
}

}  // namespace ppf
