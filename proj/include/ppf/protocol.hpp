#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "ppf/formula.hpp"
#include "ppf/multiset.hpp"

namespace ppf {

constexpr int kBottom = -1;

enum class Flavor { General, Simple, Halting, FullOutput };

const char* flavor_name(Flavor f);
Flavor flavor_from(const std::string& s);

struct Transition {
    Multiset pre;
    Multiset post;
    std::string label;

    std::size_t width() const { return ms_size(pre); }
};

// Explicit protocol (Q, T, L, X, I, O).  Identity transitions are implicit.
class Protocol {
public:
    std::vector<std::string> states;
    std::vector<Transition> transitions;
    Multiset leaders;
    std::vector<std::string> vars;
    std::vector<Sid> inputs;
    std::vector<int> outputs;
    Flavor flavor = Flavor::General;

    Sid add_state(const std::string& name, int output = kBottom);
    std::optional<Sid> find(const std::string& name) const;
    Sid at(const std::string& name) const;
    void add_var(const std::string& var, Sid input);
    Sid input_of(const std::string& var) const;

    // Adds (pre, post) unless it is an identity; names are looked up or created.
    void add(const std::vector<std::string>& pre, const std::vector<std::string>& post, std::string label);
    void add(Multiset pre, Multiset post, std::string label);

    std::size_t width() const;
    std::size_t helper_count() const { return ms_size(leaders); }
    void rebuild_index();

private:
    std::unordered_map<std::string, Sid> index_;
};

struct MultiOutputProtocol {
    Protocol base;                       // base.outputs is unused
    std::vector<std::vector<int>> outs;  // one output map per predicate
};

struct RDIProtocol {
    Protocol base;  // base.transitions is T-infinity
    std::vector<Transition> dagger;

    Protocol with_dagger() const;
};

int output_of(const std::vector<int>& outputs, const Config& c);
int consensus(int a, int b);

Config initial_config(const Protocol& p, const Valuation& v);
bool enabled(const Config& c, const Transition& t);
Config fire(const Config& c, const Transition& t);
std::vector<std::pair<std::size_t, Config>> successors(const Protocol& p, const Config& c);

std::vector<std::string> validate(const Protocol& p);

std::string config_string(const Protocol& p, const Config& c);

nlohmann::json to_json(const Protocol& p);
Protocol protocol_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RDIProtocol& p);
RDIProtocol rdi_from_json(const nlohmann::json& j);

}  // namespace ppf
