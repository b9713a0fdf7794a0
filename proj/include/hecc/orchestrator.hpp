#pragma once

#include <cstdint>
#include <vector>

#include "hecc/benchmarks.hpp"

namespace hecc {

struct RunOptions {
    Scheme scheme = Scheme::proposed;
    LspOptions lsp;
    SspOptions ssp;
};

struct SlotRecord {
    int frame = 0;
    int slot = 0;
    bool trigger = false;   // the long-term problem was solved at the start of this frame
    bool feasible = false;
    double objective = 0.0;      // ω^t Σ T^e2e + ω^c · frame cost
    double latency_total = 0.0;  // Σ_m T^e2e, s
    double cost_total = 0.0;     // frame cost, $
    std::vector<double> latency;  // per UE, s
    std::vector<double> energy;   // per UE, J
    AllocationDecision allocation;
    double offload_mean = 0.0;    // mean of 1 - phi
    int lsp_iterations = 0;       // 0 on non-trigger frames
    int ssp_iterations = 0;
    bool lsp_fallback = false;
};

struct RunTrace {
    Scheme scheme = Scheme::proposed;
    std::uint64_t seed = 0;
    std::vector<SlotRecord> slots;
    std::vector<PlacementDecision> placements;  // per frame
    std::vector<std::vector<std::uint8_t>> cost_basis;  // per frame: placement its cost was charged against
    std::vector<double> frame_costs;
    double average_cost = 0.0;
    int triggers = 0;
};

/// Starting allocation: every UE pinned to its strongest ES (or the scheme's
/// association), long-term then short-term solve on the frame-0 slot-0 state.
AllocationDecision initial_allocation(const Scenario& scenario, const RunOptions& options);

/// Two-timescale loop over config.frames frames of config.slots_per_frame slots.
/// A frame re-solves the placement when the flag is set: at frame 0, when the
/// requests change, or after a slot whose realized latency broke a deadline or
/// whose short-term problem had no feasible point. Such a slot ends its frame.
RunTrace run(const Scenario& scenario, const RunOptions& options = {});

}  // namespace hecc
