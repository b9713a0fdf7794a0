#include "hecc/system_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

namespace hecc {

PlacementDecision::PlacementDecision(int M, int K, int S)
    : num_ues(M),
      num_ess(K),
      num_services(S),
      assoc(static_cast<std::size_t>(M * K), 0),
      placement(static_cast<std::size_t>(S * K), 0),
      edge_edge(static_cast<std::size_t>(M * K * K), 0),
      edge_cloud(static_cast<std::size_t>(M * K), 0)
{
}

int PlacementDecision::forwarded(int m, int k) const
{
    int n = 0;
    for (int kp = 0; kp < num_ess; ++kp)
        if (kp != k) n += ee(m, k, kp);
    return n;
}

int PlacementDecision::serving_es(int m) const
{
    for (int k = 0; k < num_ess; ++k)
        if (a(m, k)) return k;
    return -1;
}

int PlacementDecision::services_on(int k) const
{
    int n = 0;
    for (int s = 0; s < num_services; ++s) n += g(s, k);
    return n;
}

std::vector<int> services_of(const std::vector<TaskSpec>& tasks)
{
    std::vector<int> out;
    out.reserve(tasks.size());
    for (const auto& t : tasks) out.push_back(t.service);
    return out;
}

// ---------------------------------------------------------------------------

double processing_delay(double cycles, double rate)
{
    if (!(rate > 0)) throw std::invalid_argument("processing_delay: rate must be positive");
    if (cycles < 0) throw std::invalid_argument("processing_delay: negative cycles");
    return cycles / rate;
}

double snr(double power, double gain, double b, double bandwidth, double noise_density)
{
    if (!(b > 0) || !(bandwidth > 0) || !(noise_density > 0))
        throw std::invalid_argument("snr: bandwidth share, bandwidth and noise density must be positive");
    return power * gain / (b * bandwidth * noise_density);
}

double uplink_rate(std::span<const std::uint8_t> assoc, double b, std::span<const double> snr_per_k, double bandwidth)
{
    double r = 0.0;
    for (std::size_t k = 0; k < assoc.size(); ++k)
        if (assoc[k]) r += b * bandwidth / std::numbers::ln2 * std::log1p(snr_per_k[k]);
    return r;
}

double link_rate(const ScenarioConfig& c, double gain, double b)
{
    if (!(b > 0)) return 0.0;
    double g = snr(c.tx_power, gain, b, c.bandwidth, c.noise_density);
    return b * c.bandwidth / std::numbers::ln2 * std::log1p(g);
}

double transmission_delay_ue(double size, double phi, double rate)
{
    double load = (1.0 - phi) * size;
    if (load <= 0) return 0.0;
    if (!(rate > 0)) return kInfeasible;
    return load / rate;
}

double energy(double phi, const TaskSpec& task, double rate, double power, double capacitance, double ue_rate)
{
    double compute = 0.5 * capacitance * phi * task.cycles * ue_rate * ue_rate;
    return compute + power * transmission_delay_ue(task.size, phi, rate);
}

double ue_rate(const SlotContext& ctx, const PlacementDecision& d, const AllocationDecision& alloc, int m)
{
    double r = 0.0;
    for (int k = 0; k < d.num_ess; ++k)
        if (d.a(m, k)) r += link_rate(ctx.config(), ctx.channel.gain(m, k), alloc.b[m]);
    return r;
}

// ---------------------------------------------------------------------------

HaulDelays backhaul_fronthaul_delays(const SlotContext& ctx, const PlacementDecision& d, const AllocationDecision& alloc,
                                     Form form)
{
    const auto& c = ctx.config();
    const int M = d.num_ues, K = d.num_ess;
    HaulDelays h;
    h.backhaul.assign(static_cast<std::size_t>(K), 0.0);
    h.fronthaul.assign(static_cast<std::size_t>(K), 0.0);
    for (int k = 0; k < K; ++k) {
        double to_cloud = 0.0, to_edge = 0.0;
        for (int m = 0; m < M; ++m) {
            double bits = (1.0 - alloc.phi[m]) * ctx.tasks[m].size;
            int s = ctx.tasks[m].service;
            double sig = form == Form::coupled ? d.a(m, k) : 1.0;
            to_cloud += sig * d.ec(m, k) * bits;
            for (int kp = 0; kp < K; ++kp) {
                if (kp == k) continue;
                double gate = form == Form::coupled ? d.g(s, kp) : 1.0;
                to_edge += sig * d.ee(m, k, kp) * gate * bits;
            }
        }
        h.backhaul[k] = to_cloud / c.backhaul_rate;
        h.fronthaul[k] = to_edge / c.fronthaul_rate;
    }
    return h;
}

namespace {

double combine(const std::vector<double>& branches, Reduce reduce)
{
    if (branches.empty()) return 0.0;
    if (reduce == Reduce::sum) {
        double s = 0.0;
        for (double v : branches) s += v;
        return s;
    }
    return *std::max_element(branches.begin(), branches.end());
}

}  // namespace

std::vector<double> propagation_delay(const Scenario& scenario, const PlacementDecision& d,
                                      const std::vector<int>& service_of_ue, Form form, Reduce reduce)
{
    const auto& c = scenario.config;
    const int M = d.num_ues, K = d.num_ess;
    std::vector<double> out(static_cast<std::size_t>(M));
    std::vector<double> branch(static_cast<std::size_t>(K));
    for (int m = 0; m < M; ++m) {
        int s = service_of_ue[m];
        for (int k = 0; k < K; ++k) {
            double sig = form == Form::coupled ? d.a(m, k) : 1.0;
            double v = sig * d.ec(m, k) * c.cloud_distance[k] / c.propagation_speed;
            for (int kp = 0; kp < K; ++kp) {
                if (kp == k) continue;
                double gate = form == Form::coupled ? d.g(s, kp) : 1.0;
                v += sig * d.ee(m, k, kp) * gate * scenario.es_distance_at(k, kp) / c.propagation_speed;
            }
            branch[k] = v;
        }
        out[m] = combine(branch, reduce);
    }
    return out;
}

std::vector<double> total_processing_delay(const SlotContext& ctx, const PlacementDecision& d,
                                           const AllocationDecision& alloc, Form form, Reduce reduce)
{
    const auto& c = ctx.config();
    const int M = d.num_ues, K = d.num_ess;
    std::vector<double> out(static_cast<std::size_t>(M));
    std::vector<double> branch(static_cast<std::size_t>(K));
    for (int m = 0; m < M; ++m) {
        const auto& task = ctx.tasks[m];
        double phi = alloc.phi[m];
        double local = phi * task.cycles / c.ue_rate;
        double at_es = (1.0 - phi) * task.cycles / c.es_rate;
        double at_cloud = (1.0 - phi) * task.cycles / c.cloud_rate;
        int s = task.service;
        for (int k = 0; k < K; ++k) {
            double v;
            if (form == Form::coupled) {
                double sig = d.a(m, k);
                double keep = sig * (1.0 - d.forwarded(m, k) - d.ec(m, k)) * d.g(s, k);
                double moved = 0.0;
                for (int kp = 0; kp < K; ++kp)
                    if (kp != k) moved += d.ee(m, k, kp) * d.g(s, kp);
                v = at_es * keep + sig * moved * at_es + sig * d.ec(m, k) * at_cloud;
            } else {
                double keep = d.a(m, k) - d.forwarded(m, k) - d.ec(m, k);
                v = at_es * keep + d.forwarded(m, k) * at_es + d.ec(m, k) * at_cloud;
            }
            branch[k] = v;
        }
        out[m] = local + combine(branch, reduce);
    }
    return out;
}

ComputeLoads compute_loads(const Scenario& scenario, const PlacementDecision& d, const std::vector<int>& service_of_ue,
                           Form form)
{
    const auto& c = scenario.config;
    const int M = d.num_ues, K = d.num_ess;
    ComputeLoads loads;
    loads.es.assign(static_cast<std::size_t>(K), 0.0);
    for (int k = 0; k < K; ++k) {
        double f = 0.0;
        for (int m = 0; m < M; ++m) {
            double keep = d.a(m, k) - (form == Form::coupled ? d.a(m, k) : 1) * (d.forwarded(m, k) + d.ec(m, k));
            if (form == Form::coupled) keep *= d.g(service_of_ue[m], k);
            f += keep * c.es_rate;
        }
        for (int kp = 0; kp < K; ++kp) {
            if (kp == k) continue;
            for (int mp = 0; mp < M; ++mp) {
                double in = d.ee(mp, kp, k);
                if (form == Form::coupled) in *= d.g(service_of_ue[mp], k) * d.a(mp, kp);
                f += in * c.es_rate;
            }
        }
        loads.es[k] = f;
        for (int m = 0; m < M; ++m)
            loads.cloud += (form == Form::coupled ? d.a(m, k) : 1) * d.ec(m, k) * c.cloud_rate;
    }
    return loads;
}

std::vector<LatencyBreakdown> e2e_latency(const SlotContext& ctx, const PlacementDecision& d,
                                          const AllocationDecision& alloc)
{
    const auto& c = ctx.config();
    const int M = d.num_ues, K = d.num_ess;
    auto haul = backhaul_fronthaul_delays(ctx, d, alloc);
    double shared = 0.0;
    for (int k = 0; k < K; ++k) shared = std::max(shared, haul.backhaul[k] + haul.fronthaul[k]);
    auto services = services_of(ctx.tasks);
    auto pro = propagation_delay(ctx.scenario, d, services);
    auto cp = total_processing_delay(ctx, d, alloc);

    std::vector<LatencyBreakdown> out(static_cast<std::size_t>(M));
    for (int m = 0; m < M; ++m) {
        auto& L = out[m];
        const auto& task = ctx.tasks[m];
        double phi = alloc.phi[m];
        L.ue_cp = phi * task.cycles / c.ue_rate;
        L.es_cp = (1.0 - phi) * task.cycles / c.es_rate;
        L.cloud_cp = (1.0 - phi) * task.cycles / c.cloud_rate;
        int k = d.serving_es(m);
        if (k >= 0) {
            L.radio = transmission_delay_ue(task.size, phi, ue_rate(ctx, d, alloc, m));
            L.backhaul = haul.backhaul[k];
            L.fronthaul = haul.fronthaul[k];
        }
        L.total_t = L.radio + shared;
        L.total_pro = pro[m];
        L.total_cp = cp[m];
        L.e2e = L.total_pro + L.total_cp + L.total_t;
    }
    return out;
}

std::vector<double> ue_energies(const SlotContext& ctx, const PlacementDecision& d, const AllocationDecision& alloc)
{
    const auto& c = ctx.config();
    std::vector<double> out(static_cast<std::size_t>(d.num_ues));
    for (int m = 0; m < d.num_ues; ++m) {
        double rate = ue_rate(ctx, d, alloc, m);
        out[m] = energy(alloc.phi[m], ctx.tasks[m], rate, c.tx_power, c.capacitance, c.ue_rate);
    }
    return out;
}

// ---------------------------------------------------------------------------

double status_change_cost(int g_now, int g_prev, double install, double uninstall)
{
    // ½λ²(τu+τi) - ½λ(τu-τi), regrouped so the integer factors are exact
    const int lambda = g_now - g_prev;
    return (lambda * (lambda + 1) / 2) * install + (lambda * (lambda - 1) / 2) * uninstall;
}

CostLedger total_cost(const PlacementDecision& d, const std::vector<std::uint8_t>& prev, const Prices& prices)
{
    if (!prev.empty() && prev.size() != d.placement.size())
        throw std::invalid_argument("total_cost: previous placement has the wrong size");
    CostLedger ledger;
    ledger.change.resize(d.placement.size());
    ledger.change_cost.resize(d.placement.size());
    double changes = 0.0;
    for (std::size_t i = 0; i < d.placement.size(); ++i) {
        int before = prev.empty() ? 0 : prev[i];
        ledger.change[i] = d.placement[i] - before;
        ledger.change_cost[i] = status_change_cost(d.placement[i], before, prices.install, prices.uninstall);
        changes += ledger.change_cost[i];
        ledger.operation += d.placement[i] * prices.operate;
    }
    for (auto v : d.edge_cloud) ledger.request += v * prices.request;
    ledger.total = changes + ledger.operation + ledger.request;
    return ledger;
}

// ---------------------------------------------------------------------------

AllocationDecision effective_allocation(const PlacementDecision& d, const AllocationDecision& alloc)
{
    AllocationDecision out = alloc;
    for (int m = 0; m < d.num_ues; ++m)
        if (!d.associated(m)) out.phi[m] = 1.0;
    return out;
}

double objective(const SlotContext& ctx, const PlacementDecision& d, const AllocationDecision& alloc, double cost)
{
    const auto& c = ctx.config();
    double latency = 0.0;
    for (const auto& L : e2e_latency(ctx, d, alloc)) latency += L.e2e;
    if (!std::isfinite(latency)) return kInfeasible;
    return c.weight_latency * latency + c.weight_cost * cost;
}

std::vector<Violation> structural_violations(const PlacementDecision& d, const std::vector<int>& service_of_ue,
                                             int max_services_per_es, double tol)
{
    std::vector<Violation> out;
    auto flag = [&](double residual, std::string id) {
        if (residual > tol) out.push_back({std::move(id), residual});
    };
    const int M = d.num_ues, K = d.num_ess;
    auto bits = [&](const std::vector<std::uint8_t>& v, const char* name) {
        for (std::size_t i = 0; i < v.size(); ++i)
            if (v[i] > 1) out.push_back({fmt::format("binary.{}[{}]", name, i), v[i] - 1.0});
    };
    bits(d.assoc, "assoc");
    bits(d.placement, "placement");
    bits(d.edge_edge, "edge_edge");
    bits(d.edge_cloud, "edge_cloud");

    for (int m = 0; m < M; ++m) {
        int s = service_of_ue[m];
        int assoc = 0;
        for (int k = 0; k < K; ++k) assoc += d.a(m, k);
        flag(assoc - 1.0, fmt::format("assoc_sum[{}]", m));
        for (int k = 0; k < K; ++k) {
            int fw = d.forwarded(m, k);
            int ec = d.ec(m, k);
            int sig = d.a(m, k);
            flag(d.ee(m, k, k), fmt::format("edge_edge_diagonal[{},{}]", m, k));
            flag(fw + ec - 1.0, fmt::format("coop_sum[{},{}]", m, k));
            flag(fw - 1.0, fmt::format("edge_edge_sum[{},{}]", m, k));
            flag(sig - fw - ec - d.g(s, k), fmt::format("service_availability[{},{}]", m, k));
            flag(fw + ec - sig, fmt::format("connectivity[{},{}]", m, k));
            flag(fw - sig, fmt::format("connectivity_edge[{},{}]", m, k));
            flag(ec - sig, fmt::format("connectivity_cloud[{},{}]", m, k));
            for (int kp = 0; kp < K; ++kp) {
                if (kp == k) continue;
                flag(d.ee(m, k, kp) - d.g(s, kp), fmt::format("transfer[{},{},{}]", m, k, kp));
                flag(d.ee(m, kp, k) - d.g(s, k), fmt::format("transfer[{},{},{}]", m, kp, k));
            }
        }
    }
    for (int k = 0; k < K; ++k) {
        int n = d.services_on(k);
        flag(1.0 - n, fmt::format("services_min[{}]", k));
        flag(n - static_cast<double>(max_services_per_es), fmt::format("services_max[{}]", k));
    }
    return out;
}

std::vector<Violation> check_feasibility(const SlotContext& ctx, const PlacementDecision& d,
                                         const AllocationDecision& alloc,
                                         const std::vector<std::uint8_t>& prev_placement, double tol)
{
    const auto& c = ctx.config();
    const int M = d.num_ues, K = d.num_ess;
    if (static_cast<int>(alloc.phi.size()) != M || static_cast<int>(alloc.b.size()) != M)
        throw std::invalid_argument("check_feasibility: allocation size does not match the number of UEs");

    auto services = services_of(ctx.tasks);
    auto out = structural_violations(d, services, c.max_services_per_es, tol);
    auto flag = [&](double residual, std::string id) {
        if (residual > tol || std::isnan(residual)) out.push_back({std::move(id), residual});
    };

    double bsum = 0.0;
    for (int m = 0; m < M; ++m) {
        flag(-alloc.phi[m], fmt::format("phi_min[{}]", m));
        flag(alloc.phi[m] - 1.0, fmt::format("phi_max[{}]", m));
        flag(-alloc.b[m], fmt::format("bandwidth_min[{}]", m));
        bsum += alloc.b[m];
        int assoc = 0;
        for (int k = 0; k < K; ++k) assoc += d.a(m, k);
        flag(std::abs(alloc.phi[m] + assoc * (1.0 - alloc.phi[m]) - 1.0), fmt::format("coupling[{}]", m));
    }
    flag(bsum - 1.0, "bandwidth_sum");

    auto latency = e2e_latency(ctx, d, alloc);
    auto energies = ue_energies(ctx, d, alloc);
    for (int m = 0; m < M; ++m) {
        flag(latency[m].e2e / ctx.tasks[m].deadline - 1.0, fmt::format("latency[{}]", m));
        flag(energies[m] / c.energy_cap - 1.0, fmt::format("energy[{}]", m));
        if (d.associated(m)) flag(1.0 - ue_rate(ctx, d, alloc, m) / c.rate_floor, fmt::format("rate[{}]", m));
    }

    auto cost = total_cost(d, prev_placement, c.prices);
    flag(cost.total / c.cost_cap - 1.0, "cost");
    auto loads = compute_loads(ctx.scenario, d, services);
    for (int k = 0; k < K; ++k) flag(loads.es[k] / c.es_capacity - 1.0, fmt::format("es_capacity[{}]", k));
    flag(loads.cloud / c.cloud_capacity - 1.0, "cloud_capacity");
    return out;
}

}  // namespace hecc
