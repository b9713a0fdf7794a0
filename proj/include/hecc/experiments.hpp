#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hecc/orchestrator.hpp"

namespace hecc {

/// CSV table with a fixed header. Numbers are written with 17 significant digits.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::string csv() const;
    /// Throws std::runtime_error when the file cannot be written.
    void write(const std::string& path) const;
};

std::string num(double v);

struct ExperimentOptions {
    std::vector<Scheme> schemes{Scheme::proposed};
    std::vector<std::uint64_t> seeds{1};
    int workers = 1;  // seed-level threads; output order never depends on it
    RunOptions run;   // scheme is overridden per run
};

/// Runs every (scheme, seed) pair. Result index is scheme-major.
std::vector<RunTrace> run_all(const ScenarioConfig& config, const ExperimentOptions& o);

/// frame,slot,scheme,seed,objective,latency_total,cost_total,trigger,feasible
Table run_table(const std::vector<RunTrace>& traces);

/// Per-run means: objective, latency, cost, offload, energy, feasible_rate, triggers.
struct RunSummary {
    double objective = 0.0;
    double latency = 0.0;  // mean over slots of Σ_m T^e2e
    double cost = 0.0;     // average frame cost
    double offload = 0.0;
    double energy = 0.0;   // mean over slots of Σ_m E_m
    double feasible_rate = 0.0;
    int triggers = 0;
};
RunSummary summarize(const RunTrace& trace);

/// scheme,seed,metric,value
Table compare_table(const std::vector<RunTrace>& traces);

/// algorithm,alpha,M,K,iteration,objective,penalty. Rows with algorithm 2 come from
/// the long-term solve at frame 0 for every alpha; rows with algorithm 3 from the
/// short-term solve that follows, with alpha and penalty 0.
Table convergence_table(const ScenarioConfig& config, const std::vector<double>& alphas,
                        const std::vector<std::pair<int, int>>& sizes, const RunOptions& run = {});

struct OracleGap {
    Table gap;   // frame,alg2_obj,bnb_obj,gap_pct
    Table cost;  // frame,alg2_cost,bnb_cost
};
/// Per frame, the long-term problem on the slot-0 state with the initial
/// allocation, solved by the SCA and by branch and bound against the same
/// previous placement. Throws std::runtime_error when the node cap stops the search.
OracleGap oracle_gap(const ScenarioConfig& config, const RunOptions& run = {}, long max_nodes = 2000000);

struct Sweep {
    std::string parameter;  // f_k, E_max, T_max or X_max
    std::vector<double> points;
};
/// "param:lo:hi:steps"; throws std::invalid_argument.
Sweep parse_sweep(const std::string& text);
/// Copy of the config with the swept field set.
ScenarioConfig with_parameter(ScenarioConfig config, const std::string& parameter, double value);

/// parameter,point,scheme,seed,metric,value
Table sweep_table(const ScenarioConfig& config, const Sweep& sweep, const ExperimentOptions& o);

}  // namespace hecc
