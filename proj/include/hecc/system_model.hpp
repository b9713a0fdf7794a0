#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "hecc/scenario.hpp"

namespace hecc {

inline constexpr double kInfeasible = std::numeric_limits<double>::infinity();

/// All long-term binary decisions of one frame. edge_edge is stored as a full
/// M*K*K block; its diagonal is never set.
struct PlacementDecision {
    int num_ues = 0;
    int num_ess = 0;
    int num_services = 0;
    std::vector<std::uint8_t> assoc;       // (m,k)
    std::vector<std::uint8_t> placement;   // (s,k)
    std::vector<std::uint8_t> edge_edge;   // (m,k,k')
    std::vector<std::uint8_t> edge_cloud;  // (m,k)

    PlacementDecision() = default;
    PlacementDecision(int M, int K, int S);

    std::uint8_t& a(int m, int k) { return assoc[static_cast<std::size_t>(m * num_ess + k)]; }
    std::uint8_t a(int m, int k) const { return assoc[static_cast<std::size_t>(m * num_ess + k)]; }
    std::uint8_t& g(int s, int k) { return placement[static_cast<std::size_t>(s * num_ess + k)]; }
    std::uint8_t g(int s, int k) const { return placement[static_cast<std::size_t>(s * num_ess + k)]; }
    std::uint8_t& ee(int m, int k, int kp) { return edge_edge[static_cast<std::size_t>((m * num_ess + k) * num_ess + kp)]; }
    std::uint8_t ee(int m, int k, int kp) const
    {
        return edge_edge[static_cast<std::size_t>((m * num_ess + k) * num_ess + kp)];
    }
    std::uint8_t& ec(int m, int k) { return edge_cloud[static_cast<std::size_t>(m * num_ess + k)]; }
    std::uint8_t ec(int m, int k) const { return edge_cloud[static_cast<std::size_t>(m * num_ess + k)]; }

    /// Σ_k' ee(m,k,k') over k' != k.
    int forwarded(int m, int k) const;
    /// First associated ES, or -1.
    int serving_es(int m) const;
    bool associated(int m) const { return serving_es(m) >= 0; }
    int services_on(int k) const;

    bool operator==(const PlacementDecision&) const = default;
};

struct AllocationDecision {
    std::vector<double> phi;  // local fraction per UE
    std::vector<double> b;    // bandwidth fraction per UE

    bool operator==(const AllocationDecision&) const = default;
};

/// Read-only bundle of everything a slot evaluation needs.
struct SlotContext {
    const Scenario& scenario;
    const ChannelState& channel;
    const std::vector<TaskSpec>& tasks;

    const ScenarioConfig& config() const { return scenario.config; }
};

/// Which algebraic form of the coupled expressions to evaluate.
enum class Form { coupled, simplified };
/// How the per-ES branches of a max-over-k term are combined.
enum class Reduce { max, sum };

// ---------------------------------------------------------------------------
// Primitive physics

double processing_delay(double cycles, double rate);
double snr(double power, double gain, double b, double bandwidth, double noise_density);
/// Σ_k assoc_k · b · (W/ln2) · ln(1 + snr_k).
double uplink_rate(std::span<const std::uint8_t> assoc, double b, std::span<const double> snr_per_k, double bandwidth);
/// Rate of UE m on ES k with bandwidth share b; 0 when b <= 0.
double link_rate(const ScenarioConfig& config, double gain, double b);
/// (1-phi)·size/rate; 0 when nothing is offloaded, +inf when rate is 0.
double transmission_delay_ue(double size, double phi, double rate);
double energy(double phi, const TaskSpec& task, double rate, double power, double capacitance, double ue_rate);

/// Uplink rate of UE m under the decision (0 when unassociated).
double ue_rate(const SlotContext& ctx, const PlacementDecision& d, const AllocationDecision& alloc, int m);

// ---------------------------------------------------------------------------
// Aggregates

struct HaulDelays {
    std::vector<double> backhaul;   // per ES: to the cloud
    std::vector<double> fronthaul;  // per ES: to neighbouring ESs
};

HaulDelays backhaul_fronthaul_delays(const SlotContext& ctx, const PlacementDecision& d, const AllocationDecision& alloc,
                                     Form form = Form::simplified);

std::vector<double> propagation_delay(const Scenario& scenario, const PlacementDecision& d,
                                      const std::vector<int>& service_of_ue, Form form = Form::simplified,
                                      Reduce reduce = Reduce::max);

std::vector<double> total_processing_delay(const SlotContext& ctx, const PlacementDecision& d,
                                           const AllocationDecision& alloc, Form form = Form::simplified,
                                           Reduce reduce = Reduce::max);

struct ComputeLoads {
    std::vector<double> es;  // cycles/s per ES
    double cloud = 0.0;
};

ComputeLoads compute_loads(const Scenario& scenario, const PlacementDecision& d, const std::vector<int>& service_of_ue,
                           Form form = Form::simplified);

struct LatencyBreakdown {
    double ue_cp = 0.0;     // local compute
    double es_cp = 0.0;     // compute if run at the serving ES
    double cloud_cp = 0.0;  // compute if run at the cloud
    double radio = 0.0;     // UE -> serving ES
    double backhaul = 0.0;  // serving ES -> cloud queue
    double fronthaul = 0.0; // serving ES -> neighbour queue
    double total_t = 0.0;
    double total_pro = 0.0;
    double total_cp = 0.0;
    double e2e = 0.0;
};

std::vector<LatencyBreakdown> e2e_latency(const SlotContext& ctx, const PlacementDecision& d,
                                          const AllocationDecision& alloc);

std::vector<double> ue_energies(const SlotContext& ctx, const PlacementDecision& d, const AllocationDecision& alloc);

// ---------------------------------------------------------------------------
// Cost

double status_change_cost(int g_now, int g_prev, double install, double uninstall);

struct CostLedger {
    std::vector<int> change;         // λ per (s,k)
    std::vector<double> change_cost; // x_s^k per (s,k)
    double operation = 0.0;          // Σ g τ^o
    double request = 0.0;            // Σ ec τ^r
    double total = 0.0;
};

/// prev_placement uses the (s,k) layout of PlacementDecision::placement;
/// empty means nothing was installed before.
CostLedger total_cost(const PlacementDecision& d, const std::vector<std::uint8_t>& prev_placement, const Prices& prices);

class CostAverager {
public:
    void add(double frame_cost)
    {
        sum_ += frame_cost;
        ++count_;
    }
    double average() const { return count_ ? sum_ / count_ : 0.0; }
    double sum() const { return sum_; }
    int count() const { return count_; }

private:
    double sum_ = 0.0;
    int count_ = 0;
};

// ---------------------------------------------------------------------------
// Objective and feasibility

/// phi forced to 1 for every unassociated UE.
AllocationDecision effective_allocation(const PlacementDecision& d, const AllocationDecision& alloc);

/// ω^t Σ_m T^e2e + ω^c · cost. +inf if any latency is infeasible.
double objective(const SlotContext& ctx, const PlacementDecision& d, const AllocationDecision& alloc, double cost);

struct Violation {
    std::string id;
    double residual = 0.0;
};

inline constexpr double kFeasibilityTol = 1e-6;

/// Binary-structure checks only.
std::vector<Violation> structural_violations(const PlacementDecision& d, const std::vector<int>& service_of_ue,
                                             int max_services_per_es, double tol = kFeasibilityTol);

/// Every constraint of the joint problem. Dimensioned constraints are
/// reported relative to their cap (lhs/cap - 1).
std::vector<Violation> check_feasibility(const SlotContext& ctx, const PlacementDecision& d,
                                         const AllocationDecision& alloc,
                                         const std::vector<std::uint8_t>& prev_placement,
                                         double tol = kFeasibilityTol);

std::vector<int> services_of(const std::vector<TaskSpec>& tasks);

}  // namespace hecc
