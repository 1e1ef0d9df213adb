#pragma once

#include "ppf/machine.hpp"
#include "ppf/protocol.hpp"

namespace ppf {

// Two copies (q,0), (q,1) of every state; the copy bit is the agent's opinion.
Protocol spp_to_fopp(const Protocol& p);

// Adds states @f, @t, @bot and one reporter leader at @bot.
Protocol fopp_to_spp(const Protocol& p);

// On-demand version of spp_to_fopp over any machine.
class FullOutputMachine : public RuleMachine {
public:
    explicit FullOutputMachine(MachinePtr base);

    Sid input(std::size_t i) override;
    Multiset leaders() override;
    std::size_t width() const override { return std::max<std::size_t>(2, base_->width()); }
    std::optional<std::uint64_t> declared_states() const override;

protected:
    int key_output(const Key& k) override { return k[1]; }
    std::string render_key(const Key& k) override;
    void compute(const std::vector<Sid>& pre, std::vector<Reaction>& out) override;

private:
    Sid lift(Sid q, int bit) { return intern(Key{static_cast<std::int32_t>(q), bit}); }
    MachinePtr base_;
};

// Conjunction of two leaderless machines over the same variables.  Each
// step advances one component; the other components ride along unchanged.
class ProductMachine : public RuleMachine {
public:
    ProductMachine(MachinePtr a, MachinePtr b);

    Sid input(std::size_t i) override;
    Multiset leaders() override { return {}; }
    std::size_t width() const override { return std::max(a_->width(), b_->width()); }
    std::optional<std::uint64_t> declared_states() const override;

protected:
    int key_output(const Key& k) override;
    std::string render_key(const Key& k) override;
    void compute(const std::vector<Sid>& pre, std::vector<Reaction>& out) override;

private:
    MachinePtr a_, b_;
    std::vector<std::size_t> b_var_;
};

}  // namespace ppf
