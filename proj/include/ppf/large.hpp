#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "ppf/formula.hpp"
#include "ppf/machine.hpp"
#include "ppf/protocol.hpp"

namespace ppf {

using Coeffs = std::map<std::string, std::int64_t>;

// Names of the canonical representation of d over powers 2^0..2^n.
// Signed naming ("+4", "-1") for threshold protocols, plain ("4") otherwise.
std::vector<std::string> canonical_rep(std::int64_t d, int n, bool sign = true);

// Smallest n with 2^n > max(|coefficients|, bound, modulus).
int rdi_bits(const Atom& normalized);

RDIProtocol build_threshold_rdi(const Coeffs& a, std::int64_t b, const std::vector<std::string>& vars);
RDIProtocol build_remainder_rdi(const Coeffs& a, std::int64_t b, std::int64_t m, const std::vector<std::string>& vars);
// Dispatches on the normalized atom kind (AtLeast or ModAtLeast).
RDIProtocol build_rdi(const Atom& normalized, const std::vector<std::string>& vars);

std::string hi_var(const std::string& x);
std::string lo_var(const std::string& x);
std::vector<std::string> tilde_vars(const std::vector<std::string>& vars);
// Atom over x.hi, x.lo with phi~(hi, lo) = phi(k*hi + lo).
Atom tilde_transform(const Atom& a, std::int64_t k);

MultiOutputProtocol combine_multi_output(const std::vector<RDIProtocol>& rdis, const std::vector<std::string>& vars,
                                         std::size_t k);

// One fresh output pair and one helper per connective.
Protocol boolean_combine(const MultiOutputProtocol& mop, const Node& root, const std::vector<Atom>& atom_index);

Protocol kway_to_2way(const Protocol& p);

// Helpers h_1..h_l: leader states sorted by name, multiplicities expanded.
std::vector<Sid> helper_order(const Protocol& p);

// Leaderless protocol computing (|v| >= l) -> phi from a 2-way protocol with l helpers.
class HelperRemovalMachine : public RuleMachine {
public:
    explicit HelperRemovalMachine(Protocol p);

    Sid input(std::size_t i) override { return count_state(i, 1); }
    Multiset leaders() override { return {}; }
    std::size_t width() const override { return 2; }
    std::optional<std::uint64_t> declared_states() const override;

    std::size_t ell() const { return helpers_.size(); }
    const Protocol& inner() const { return p_; }

protected:
    int key_output(const Key& k) override;
    std::string render_key(const Key& k) override;
    void compute(const std::vector<Sid>& pre, std::vector<Reaction>& out) override;

private:
    Sid count_state(std::size_t var, std::size_t i) {
        return intern(Key{0, static_cast<std::int32_t>(var), static_cast<std::int32_t>(i)});
    }
    Sid pair_state(Sid a, Sid b);
    void simulate(Sid a, Sid b, Sid c, Sid d, std::vector<Reaction>& out);

    Protocol p_;
    std::vector<Sid> helpers_;
    std::unordered_map<Multiset, std::vector<Multiset>, MultisetHash> inner_;
};

struct StageStat {
    std::string name;
    std::uint64_t states = 0;
    std::optional<std::uint64_t> transitions;
    std::uint64_t helpers = 0;
    std::size_t width = 0;
};

StageStat stat_of(const std::string& name, const Protocol& p);

struct LargeResult {
    Formula normalized;
    std::vector<Atom> atoms;
    std::vector<RDIProtocol> rdis;
    std::optional<MultiOutputProtocol> dispatch;
    Protocol combined;  // simple, with helpers
    Protocol two_way;   // padded to l helpers
    std::size_t ell = 0;
    std::vector<StageStat> stats;

    std::shared_ptr<HelperRemovalMachine> machine() const;
};

LargeResult compile_large(const Formula& phi);

}  // namespace ppf
