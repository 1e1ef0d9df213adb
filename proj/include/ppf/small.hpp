#pragma once

#include <map>
#include <string>
#include <vector>

#include "ppf/formula.hpp"
#include "ppf/large.hpp"
#include "ppf/machine.hpp"
#include "ppf/protocol.hpp"

namespace ppf {

struct GreaterSumShape {
    int m = 0;  // probed bit positions
    std::int64_t seed_x = 0, seed_y = 0;
};

GreaterSumShape greater_sum_shape(const Coeffs& a, std::int64_t c, int i);

// Halting protocol with one leader deciding a.v > c on inputs of size exactly i.
Protocol build_greater_sum_halting(const Coeffs& a, std::int64_t c, int i, const std::vector<std::string>& vars);

// Halting machine deciding lo <= (a.v mod m) <= hi on inputs of size exactly i.
MachinePtr build_remainder_halting(const Coeffs& a, std::int64_t m, std::int64_t lo, std::int64_t hi, int i,
                                   const std::vector<std::string>& vars);

// Same transitions, outputs of the final states swapped.
class NegateMachine : public Machine {
public:
    explicit NegateMachine(MachinePtr base);

    Sid input(std::size_t i) override { return base_->input(i); }
    Multiset leaders() override { return base_->leaders(); }
    int output(Sid s) override;
    std::string name(Sid s) override { return base_->name(s); }
    std::size_t width() const override { return base_->width(); }
    const std::vector<Reaction>& react(const Multiset& pre) override;
    std::optional<std::uint64_t> declared_states() const override { return base_->declared_states(); }

private:
    MachinePtr base_;
    std::unordered_map<Multiset, std::vector<Reaction>, MultisetHash> cache_;
};

enum class HaltingOp { And, Or };

// Runs the first part, then restarts every agent into the second part through
// its tag when the first part's verdict does not settle the connective.
class HaltingCombineMachine : public RuleMachine {
public:
    HaltingCombineMachine(HaltingOp op, MachinePtr first, MachinePtr second);

    Sid input(std::size_t i) override;
    Multiset leaders() override;
    std::size_t width() const override { return 2; }
    std::optional<std::uint64_t> declared_states() const override;

    // Tag of a tagged state (vars.size() for the leader tag), -1 for untagged ones.
    int tag_of(Sid s) const;

protected:
    int key_output(const Key& k) override;
    std::string render_key(const Key& k) override;
    void compute(const std::vector<Sid>& pre, std::vector<Reaction>& out) override;

private:
    Machine& part(int j) { return j == 1 ? *first_ : *second_; }
    Sid tagged(int tag, int j, Sid q) { return intern(Key{0, tag, j, static_cast<std::int32_t>(q)}); }
    Sid start(int tag, int j);
    Sid final_tagged(int tag, int b) { return intern(Key{1, tag, b}); }
    Sid final_state(int b) { return intern(Key{2, b}); }
    void lift(const Reaction& r, const std::vector<int>& tags, int j, const std::string& label,
              std::vector<Reaction>& out);

    HaltingOp op_;
    MachinePtr first_, second_;
    Sid leader1_ = 0, leader2_ = 0;
};

// Halting machine for phi's tree at size i: thresholds via Greater-Sum, remainders via disjunctions.
MachinePtr halting_for_size(const Formula& phi, int i);

// One leader: counts the population up to l and runs the part for the counted size.
class FixedSizeMachine : public RuleMachine {
public:
    FixedSizeMachine(std::map<int, MachinePtr> parts, std::size_t ell, std::vector<std::string> vars);

    Sid input(std::size_t i) override { return intern(Key{0, static_cast<std::int32_t>(i)}); }
    Multiset leaders() override { return ms_of({intern(Key{3, 0, 0, 0, -1})}); }
    std::size_t width() const override { return 2; }
    std::optional<std::uint64_t> declared_states() const override;

    bool is_top(Sid s) const { return key(s)[0] == 2; }

protected:
    int key_output(const Key& k) override;
    std::string render_key(const Key& k) override;
    void compute(const std::vector<Sid>& pre, std::vector<Reaction>& out) override;

private:
    Machine* part(int i);
    Sid agent(int var, int i, int q) { return intern(Key{1, var, i, q}); }
    Sid fresh_agent(int var, int i);
    Sid top() { return intern(Key{2}); }
    Sid leader(int c, int b, int k, int pl) { return intern(Key{3, c, b, k, pl}); }
    void pair_rules(Sid a, Sid l, std::vector<Reaction>& out);

    std::map<int, MachinePtr> parts_;
    int ell_;
};

// Leaderless: every agent starts as a candidate carrying a copy of the leaders.
class KillLeaderMachine : public RuleMachine {
public:
    KillLeaderMachine(MachinePtr base, std::size_t ell);

    Sid input(std::size_t i) override;
    Multiset leaders() override { return {}; }
    std::size_t width() const override { return 2; }
    std::optional<std::uint64_t> declared_states() const override;

    bool is_top(Sid s) const { return key(s)[0] == 2; }

protected:
    int key_output(const Key& k) override;
    std::string render_key(const Key& k) override;
    void compute(const std::vector<Sid>& pre, std::vector<Reaction>& out) override;

private:
    // [0, popsize, resetcounter, init, q, l_1..l_L]
    Sid candidate(int ps, int rc, int var, Sid q, const std::vector<Sid>& ls);
    Sid regular(int var, Sid q, bool active) {
        return intern(Key{1, var, static_cast<std::int32_t>(q), active ? 1 : 0});
    }
    Sid top() { return intern(Key{2}); }
    void pair_rules(Sid a, Sid b, std::vector<Reaction>& out);
    void internal_rules(Sid a, std::vector<Reaction>& out);

    MachinePtr base_;
    int ell_;
    std::vector<Sid> base_leaders_;
};

struct SmallResult {
    std::size_t ell = 0;
    std::map<int, MachinePtr> parts;
    std::shared_ptr<FixedSizeMachine> fixed;
    std::shared_ptr<KillLeaderMachine> machine;
};

// Leaderless machine computing (|v| < l) -> phi.
SmallResult compile_small(const Formula& phi, std::size_t ell);

}  // namespace ppf
