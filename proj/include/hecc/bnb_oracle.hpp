#pragma once

#include <cstdint>

#include "hecc/longterm_sca.hpp"

namespace hecc {

enum class OracleMode { exhaustive, bnb };

struct OracleOptions {
    OracleMode mode = OracleMode::bnb;
    std::uint64_t max_combinations = 1ull << 24;  // exhaustive mode only
    double integrality_tol = 1e-6;
    long max_nodes = 2000000;
    SolverOptions solver;
};

struct OracleResult {
    PlacementDecision decision;
    double objective = kInf;  // η_L of the decision, +inf when nothing is feasible
    bool feasible = false;
    bool complete = true;     // false when the node limit stopped the search
    long nodes = 0;           // relaxations solved, or combinations checked
};

/// Globally optimal long-term decision. Exhaustive mode returns the
/// lexicographically smallest flattened vector among equal objectives; branch
/// and bound applies the same rule to the candidates it visits.
/// Exhaustive mode throws std::invalid_argument above max_combinations.
OracleResult solve_oracle(const LspProblem& p, const OracleOptions& options = {});

}  // namespace hecc
