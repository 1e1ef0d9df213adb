#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ppf/protocol.hpp"

namespace ppf {

struct Reaction {
    Multiset post;
    std::uint32_t label;
};

struct Step {
    Config next;
    std::uint32_t label;
};

// A protocol whose states and transitions may be generated on demand.
// State ids are interned lazily, so a machine is confined to one thread.
class Machine {
public:
    virtual ~Machine() = default;

    std::vector<std::string> vars;
    Flavor flavor = Flavor::General;

    virtual Sid input(std::size_t var_index) = 0;
    virtual Multiset leaders() = 0;
    virtual int output(Sid s) = 0;
    virtual std::string name(Sid s) = 0;
    virtual std::size_t width() const = 0;
    // Non-identity reactions of the agents in `pre`.
    virtual const std::vector<Reaction>& react(const Multiset& pre) = 0;
    virtual std::optional<std::uint64_t> declared_states() const { return std::nullopt; }

    const std::string& label(std::uint32_t id) const { return labels_[id]; }
    std::uint32_t label_id(const std::string& s);

    Config initial(const Valuation& v);
    int config_output(const Config& c);
    // Distinct successors in deterministic order.
    void steps(const Config& c, std::vector<Step>& out);
    std::string render(const Config& c);

private:
    std::vector<std::string> labels_;
    std::unordered_map<std::string, std::uint32_t> label_index_;
};

using MachinePtr = std::shared_ptr<Machine>;

class ExplicitMachine : public Machine {
public:
    explicit ExplicitMachine(Protocol p);

    Sid input(std::size_t var_index) override { return p_.inputs.at(var_index); }
    Multiset leaders() override { return p_.leaders; }
    int output(Sid s) override { return p_.outputs[s]; }
    std::string name(Sid s) override { return p_.states[s]; }
    std::size_t width() const override { return width_; }
    const std::vector<Reaction>& react(const Multiset& pre) override;
    std::optional<std::uint64_t> declared_states() const override { return p_.states.size(); }

    const Protocol& protocol() const { return p_; }

private:
    Protocol p_;
    std::size_t width_;
    std::unordered_map<Multiset, std::vector<Reaction>, MultisetHash> index_;
    std::vector<Reaction> none_;
};

using Key = std::vector<std::int32_t>;

struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept;
};

// Machine over structured state keys; subclasses describe the rules.
class RuleMachine : public Machine {
public:
    int output(Sid s) override { return outputs_[s]; }
    std::string name(Sid s) override { return render_key(keys_[s]); }
    const std::vector<Reaction>& react(const Multiset& pre) override;

    std::size_t interned() const { return keys_.size(); }

protected:
    Sid intern(const Key& k);
    const Key& key(Sid s) const { return keys_[s]; }

    virtual int key_output(const Key& k) = 0;
    virtual std::string render_key(const Key& k) = 0;
    // Appends reactions of `pre` (given as sorted ids); identities are dropped later.
    virtual void compute(const std::vector<Sid>& pre, std::vector<Reaction>& out) = 0;

    void emit(std::vector<Reaction>& out, std::vector<Sid> post, const std::string& label);

private:
    std::vector<Key> keys_;
    std::vector<int> outputs_;
    std::unordered_map<Key, Sid, KeyHash> index_;
    std::unordered_map<Multiset, std::vector<Reaction>, MultisetHash> cache_;
};

struct MaterializeLimits {
    std::size_t max_states = 20000;
    std::size_t max_transitions = 2000000;
};

// Closure of the machine's states from inputs and leaders; nullopt past the limits.
std::optional<Protocol> materialize(Machine& m, const MaterializeLimits& lim = {});

}  // namespace ppf
