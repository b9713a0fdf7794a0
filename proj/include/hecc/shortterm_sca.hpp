#pragma once

#include <optional>
#include <vector>

#include "hecc/conic.hpp"
#include "hecc/system_model.hpp"

namespace hecc {

/// Concave lower bound of b·(W/ln2)·ln(1 + a0/b) around b̄, in bits/s;
/// a0 = P·gain/(W·N0). Equal to the rate at b = b̄.
double rate_lower_bound(double b, double b_anchor, double a0, double bandwidth);

/// Convex upper bound of y·z around (ȳ, z̄): ½(z̄/ȳ·y² + ȳ/z̄·z²).
double bilinear_upper_bound(double y, double z, double y_anchor, double z_anchor);

/// Allocation variables a scheme fixes.
struct AllocationPins {
    std::optional<double> bandwidth;  // b of every associated UE
    std::optional<double> phi;        // phi of every associated UE
};

struct SspOptions {
    double tolerance = 1e-4;  // relative change of the objective
    int max_iterations = 50;
    int restoration_iterations = 20;
    SolverOptions solver;
};

struct SspTraceRow {
    int iteration = 0;
    double objective = 0.0;     // true objective of the iterate
    double max_residual = 0.0;  // largest relative violation, 0 when feasible
};

struct SspResult {
    AllocationDecision allocation;  // phi = 1, b = 0 for unassociated UEs
    std::vector<SspTraceRow> trace;
    double objective = kInfeasible;
    bool feasible = false;
    bool converged = false;
    bool restored = false;  // the start point needed the restoration phase
    std::vector<Violation> report;
};

/// Short-term subproblem for a fixed placement. `cost` is the frame cost and
/// enters the objective as a constant.
SspResult solve_ssp(const SlotContext& ctx, const PlacementDecision& d, double cost, const AllocationPins& pins = {},
                    const SspOptions& options = {});

/// Allocation-related violations only (latency, energy, rate, bandwidth, coupling).
std::vector<Violation> allocation_violations(const SlotContext& ctx, const PlacementDecision& d,
                                             const AllocationDecision& alloc);

}  // namespace hecc
