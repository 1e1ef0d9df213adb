#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "ppf/formula.hpp"
#include "ppf/machine.hpp"

namespace ppf {

struct ReachGraph {
    std::vector<Config> nodes;
    std::vector<std::uint32_t> offsets;  // CSR: successors of i are targets[offsets[i]..offsets[i+1])
    std::vector<std::uint32_t> targets;
    std::vector<std::uint32_t> labels;
    std::vector<std::uint32_t> parent;  // BFS tree, root points to itself
    std::vector<std::uint32_t> parent_label;
    bool truncated = false;

    std::size_t size() const { return nodes.size(); }
};

std::size_t default_node_cap();

ReachGraph explore(Machine& m, const Config& c0, std::size_t node_cap);

// Strongly connected components; comp[i] is the component of node i.
struct SccResult {
    std::vector<std::uint32_t> comp;
    std::uint32_t count = 0;
    std::vector<bool> bottom;
};

SccResult tarjan(const ReachGraph& g);

std::vector<std::string> witness(Machine& m, const ReachGraph& g, std::uint32_t node);

enum class Verdict { Pass, Fail, Inconclusive };
const char* verdict_name(Verdict v);

struct InputReport {
    Valuation input;
    int expected = 0;
    Verdict verdict = Verdict::Pass;
    std::size_t nodes = 0;
    std::vector<std::string> trace;
    std::string bad_config;
    int bad_output = kBottom;
};

struct Report {
    std::vector<InputReport> rows;
    std::size_t pass = 0, fail = 0, inconclusive = 0;
    std::uint64_t explored = 0;

    bool ok() const { return fail == 0 && inconclusive == 0; }
    void add(InputReport r);
    nlohmann::json to_json() const;
};

using Expectation = std::function<int(const Valuation&)>;
using MachineFactory = std::function<MachinePtr()>;

InputReport check_input(Machine& m, const Valuation& v, int expected, std::size_t node_cap);

Report check_computes(const MachineFactory& make, const Expectation& expected, const std::vector<Valuation>& inputs,
                      std::size_t node_cap = default_node_cap(), int jobs = 1);

// All valuations over `vars` whose total lies in [lo, hi].
std::vector<Valuation> inputs_between(const std::vector<std::string>& vars, int lo, int hi);

// Guard "none", "ge:l" or "lt:l" applied to the formula's value.
Expectation guarded(const Formula& phi, const std::string& guard);

struct HaltingReport {
    std::size_t inputs = 0, nodes = 0;
    std::vector<std::string> violations;
    bool truncated = false;

    bool ok() const { return violations.empty() && !truncated; }
    nlohmann::json to_json() const;
};

HaltingReport check_halting(Machine& m, const std::vector<Valuation>& inputs, std::size_t node_cap = default_node_cap());

struct RdiOptions {
    int max_pop = 3;        // bound on |w|
    int max_depth = 0;      // 0: closure
    int samples = 200;      // reversibility pairs
    std::uint64_t seed = 1;
    std::size_t node_cap = default_node_cap();
};

struct RdiReport {
    std::size_t init_nodes = 0, computation_nodes = 0, samples = 0;
    std::size_t input_bound_violations = 0, reversibility_failures = 0, computation_failures = 0;
    bool truncated = false;
    std::vector<std::string> details;

    bool input_bound_ok() const { return input_bound_violations == 0 && !truncated; }
    bool reversibility_ok() const { return reversibility_failures == 0 && !truncated; }
    bool computation_ok() const { return computation_failures == 0 && !truncated; }
    bool ok() const { return input_bound_ok() && reversibility_ok() && computation_ok(); }
    nlohmann::json to_json() const;
};

RdiReport check_rdi(const RDIProtocol& rdi, const Expectation& phi, const RdiOptions& opt = {});

struct SimResult {
    bool stabilized = false;
    int output = kBottom;
    std::uint64_t steps = 0;
    std::string final_config;

    nlohmann::json to_json() const;
};

SimResult simulate(Machine& m, const Valuation& v, std::uint64_t seed, std::uint64_t max_steps = 1000000,
                   std::uint64_t window = 50000);

}  // namespace ppf
