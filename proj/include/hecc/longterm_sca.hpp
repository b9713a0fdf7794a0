#pragma once

#include <cstdint>
#include <vector>

#include "hecc/conic.hpp"
#include "hecc/system_model.hpp"

namespace hecc {

/// Variables a scheme fixes before the long-term solve.
struct PlacementPins {
    std::vector<int> assoc;            // per UE: -1 free, otherwise the forced ES
    bool no_edge_edge = false;
    bool no_edge_cloud = false;
    bool require_association = false;  // every UE must offload somewhere
};

/// Everything the long-term subproblem holds fixed.
struct LspProblem {
    const Scenario& scenario;
    const ChannelState& channel;
    const std::vector<TaskSpec>& tasks;
    AllocationDecision allocation;             // most recent short-term solution
    std::vector<std::uint8_t> prev_placement;  // empty: nothing installed yet
    PlacementPins pins;
};

/// Index map from relaxed binaries and auxiliaries to program variables.
/// The relaxed binaries come first, in the order sigma, g, edge-edge, edge-cloud.
struct LspLayout {
    int M = 0, K = 0, S = 0;
    int num_binary = 0;
    int sigma0 = 0, g0 = 0, ee0 = 0, ec0 = 0;
    int tcp0 = 0, tpro0 = 0, theta = 0;

    LspLayout() = default;
    LspLayout(int M, int K, int S);

    int sigma(int m, int k) const { return sigma0 + m * K + k; }
    int g(int s, int k) const { return g0 + s * K + k; }
    int ee(int m, int k, int kp) const { return ee0 + (m * K + k) * (K - 1) + (kp < k ? kp : kp - 1); }
    int ec(int m, int k) const { return ec0 + m * K + k; }
    int tcp(int m) const { return tcp0 + m; }
    int tpro(int m) const { return tpro0 + m; }
    int num_vars() const { return theta + 1; }
};

std::vector<double> flatten(const LspLayout& layout, const PlacementDecision& d);
/// Rounds with floor(x + 0.5).
PlacementDecision round_decision(const LspLayout& layout, const std::vector<double>& x);

/// Σ (δ - δ²) over every relaxed binary. Throws for entries outside [0,1].
double penalty(const std::vector<double>& delta);
/// Σ (δ - 2 δ δ̄ + δ̄²).
double penalty_surrogate(const std::vector<double>& delta, const std::vector<double>& anchor);

/// Allocation the long-term model uses: the given one, with b = 1/M and
/// phi = 0.5 for UEs that currently hold no bandwidth.
AllocationDecision lsp_allocation(const LspProblem& p);

struct LspModel {
    ConicProgram program;
    LspLayout layout;
};

/// Convex model of the long-term subproblem around the anchors. The latency
/// part of the objective is multiplied by `scale`; the penalty enters as
/// alpha times the linear surrogate. alpha = 0 gives the plain relaxation.
LspModel build_lsp_program(const LspProblem& p, const std::vector<double>& anchors, double alpha, double scale);

/// η_L of a binary decision with the fixed allocation, in seconds and currency
/// (same as system_model::objective under the long-term allocation).
double lsp_objective(const LspProblem& p, const PlacementDecision& d);

/// Long-term constraint check of a binary decision (structure, latency,
/// energy, rate, cost and compute caps under the fixed allocation).
std::vector<Violation> lsp_violations(const LspProblem& p, const PlacementDecision& d);

struct LspOptions {
    double alpha = 1e4;
    double objective_scale = 1e3;  // latency objective in milliseconds
    double tolerance = 1e-4;       // relative change of the penalized objective
    int max_iterations = 50;
    int max_retries = 10;
    double anchor_spread = 0.0;    // first attempt: anchors uniform in 0.5 ± spread
    double retry_spread = 0.05;    // later attempts
    double tie_break = 1e-3;       // offset of anchors stuck at 0.5, towards the rounded decision
    std::uint64_t seed = 1;
    std::uint64_t key = 0;         // frame index, keys the anchor stream
    SolverOptions solver;
};

struct LspTraceRow {
    int iteration = 0;
    double objective = 0.0;  // penalized objective of the convex program
    double penalty = 0.0;    // true penalty of the iterate
    double max_fractionality = 0.0;
};

struct LspResult {
    PlacementDecision decision;
    std::vector<LspTraceRow> trace;  // last attempt only
    double objective = 0.0;          // η_L of the returned decision
    int attempts = 0;
    bool converged = false;
    bool fallback = false;           // retries exhausted, heuristic used
    std::vector<Violation> report;   // non-empty when even the fallback fails
};

LspResult solve_lsp(const LspProblem& p, const LspOptions& options = {});

/// Heuristic decision: nothing offloaded, previous placement kept when valid,
/// otherwise the most requested services installed.
PlacementDecision all_local_decision(const LspProblem& p);

}  // namespace hecc
