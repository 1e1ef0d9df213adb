#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "ppf/formula.hpp"
#include "ppf/large.hpp"
#include "ppf/machine.hpp"
#include "ppf/verify.hpp"

namespace ppf {

// max(3, helper count of the large half before helper removal).
std::size_t compute_cutoff(const Formula& phi);

// Conjunction of two leaderless machines through their full-output versions.
MachinePtr product_and(MachinePtr a, MachinePtr b);

const std::vector<std::string>& compile_modes();

struct CompilationResult {
    Formula formula;
    std::string mode;
    int size = 0;
    std::size_t ell = 0;
    std::vector<StageStat> stats;
    MachineFactory factory;
    std::optional<Protocol> protocol;  // explicit form when it fits the limits
    std::optional<RDIProtocol> rdi;

    nlohmann::json to_json() const;
};

// Modes: large, small, full, rdi-threshold, rdi-remainder, greater-sum.
// `size` is the population size for greater-sum and an optional cutoff override for small.
// Only large mode is materialized; zero max_states skips it.
CompilationResult compile(const Formula& phi, const std::string& mode = "full", int size = 0,
                          const MaterializeLimits& limits = {2000, 200000});

nlohmann::json stats_json(const std::vector<StageStat>& stats);

// Machine factory for a compile output, a bare protocol or an RDI document.
MachineFactory load_machine(const nlohmann::json& doc);

}  // namespace ppf
