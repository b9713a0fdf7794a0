#include "hecc/longterm_sca.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace hecc {

namespace {

constexpr double kTimeUnit = 1e-3;  // program time variables are in ms

bool allocation_only(const std::string& id)
{
    return id.starts_with("phi_") || id.starts_with("bandwidth") || id.starts_with("coupling");
}

}  // namespace

LspLayout::LspLayout(int M_, int K_, int S_) : M(M_), K(K_), S(S_)
{
    sigma0 = 0;
    g0 = sigma0 + M * K;
    ee0 = g0 + S * K;
    ec0 = ee0 + M * K * (K - 1);
    num_binary = ec0 + M * K;
    tcp0 = num_binary;
    tpro0 = tcp0 + M;
    theta = tpro0 + M;
}

std::vector<double> flatten(const LspLayout& L, const PlacementDecision& d)
{
    std::vector<double> x(static_cast<std::size_t>(L.num_binary), 0.0);
    for (int m = 0; m < L.M; ++m)
        for (int k = 0; k < L.K; ++k) {
            x[L.sigma(m, k)] = d.a(m, k);
            x[L.ec(m, k)] = d.ec(m, k);
            for (int kp = 0; kp < L.K; ++kp)
                if (kp != k) x[L.ee(m, k, kp)] = d.ee(m, k, kp);
        }
    for (int s = 0; s < L.S; ++s)
        for (int k = 0; k < L.K; ++k) x[L.g(s, k)] = d.g(s, k);
    return x;
}

PlacementDecision round_decision(const LspLayout& L, const std::vector<double>& x)
{
    auto r = [&](int i) { return static_cast<std::uint8_t>(std::floor(x[i] + 0.5) >= 1.0 ? 1 : 0); };
    PlacementDecision d(L.M, L.K, L.S);
    for (int m = 0; m < L.M; ++m)
        for (int k = 0; k < L.K; ++k) {
            d.a(m, k) = r(L.sigma(m, k));
            d.ec(m, k) = r(L.ec(m, k));
            for (int kp = 0; kp < L.K; ++kp)
                if (kp != k) d.ee(m, k, kp) = r(L.ee(m, k, kp));
        }
    for (int s = 0; s < L.S; ++s)
        for (int k = 0; k < L.K; ++k) d.g(s, k) = r(L.g(s, k));
    return d;
}

double penalty(const std::vector<double>& delta)
{
    double p = 0.0;
    for (double v : delta) {
        if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument(fmt::format("penalty: entry {} outside [0,1]", v));
        p += v - v * v;
    }
    return p;
}

double penalty_surrogate(const std::vector<double>& delta, const std::vector<double>& anchor)
{
    if (delta.size() != anchor.size()) throw std::invalid_argument("penalty_surrogate: size mismatch");
    double p = 0.0;
    for (std::size_t i = 0; i < delta.size(); ++i) p += delta[i] * (1.0 - 2.0 * anchor[i]) + anchor[i] * anchor[i];
    return p;
}

AllocationDecision lsp_allocation(const LspProblem& p)
{
    const int M = p.scenario.num_ues();
    AllocationDecision a = p.allocation;
    a.phi.resize(static_cast<std::size_t>(M), 0.5);
    a.b.resize(static_cast<std::size_t>(M), 0.0);
    for (int m = 0; m < M; ++m)
        if (!(a.b[m] > 0.0)) {
            a.b[m] = 1.0 / M;
            a.phi[m] = 0.5;
        }
    return a;
}

LspModel build_lsp_program(const LspProblem& p, const std::vector<double>& anchors, double alpha, double scale)
{
    const auto& c = p.scenario.config;
    const int M = c.num_ues, K = c.num_ess, S = c.num_services;
    LspLayout L(M, K, S);
    if (static_cast<int>(anchors.size()) != L.num_binary)
        throw std::invalid_argument("build_lsp_program: anchor count does not match the layout");
    if (static_cast<int>(p.tasks.size()) != M) throw std::invalid_argument("build_lsp_program: task count mismatch");
    if (!p.prev_placement.empty() && static_cast<int>(p.prev_placement.size()) != S * K)
        throw std::invalid_argument("build_lsp_program: previous placement has the wrong size");
    const auto alloc = lsp_allocation(p);

    ConicProgram P;
    for (int m = 0; m < M; ++m)
        for (int k = 0; k < K; ++k) P.add_variable(fmt::format("sigma[{},{}]", m, k), 0.0, 1.0);
    for (int s = 0; s < S; ++s)
        for (int k = 0; k < K; ++k) P.add_variable(fmt::format("g[{},{}]", s, k), 0.0, 1.0);
    for (int m = 0; m < M; ++m)
        for (int k = 0; k < K; ++k)
            for (int kp = 0; kp < K; ++kp)
                if (kp != k) P.add_variable(fmt::format("ee[{},{},{}]", m, k, kp), 0.0, p.pins.no_edge_edge ? 0.0 : 1.0);
    for (int m = 0; m < M; ++m)
        for (int k = 0; k < K; ++k) P.add_variable(fmt::format("ec[{},{}]", m, k), 0.0, p.pins.no_edge_cloud ? 0.0 : 1.0);
    for (int m = 0; m < M; ++m) P.add_variable(fmt::format("tcp[{}]", m), 0.0);
    for (int m = 0; m < M; ++m) P.add_variable(fmt::format("tpro[{}]", m), 0.0);
    P.add_variable("theta", 0.0);

    // objective weights: scale·ω^t per second of latency, scale·ω^c per unit cost
    const double wt = scale * c.weight_latency * kTimeUnit;
    const double wc = scale * c.weight_cost;

    for (int m = 0; m < M; ++m) {
        const auto& task = p.tasks[m];
        const int s = task.service;
        const double y = 1.0 - alloc.phi[m];
        const double t_loc = task.cycles / c.ue_rate / kTimeUnit;
        const double t_es = y * task.cycles / c.es_rate / kTimeUnit;
        const double t_c = y * task.cycles / c.cloud_rate / kTimeUnit;
        const double e_loc = 0.5 * c.capacitance * task.cycles * c.ue_rate * c.ue_rate;
        const double bits = y * task.size;

        std::vector<Term> latency, energy, rate, assoc;
        for (int k = 0; k < K; ++k) {
            double r = link_rate(c, p.channel.gain(m, k), alloc.b[m]);
            double radio = bits > 0 ? (r > 0 ? bits / r : kInf) : 0.0;
            int v = L.sigma(m, k);
            bool usable = std::isfinite(radio) && r >= c.rate_floor;
            int pin = p.pins.assoc.empty() ? -1 : p.pins.assoc[m];
            if (pin >= 0) {
                P.add_row({{v, 1.0}}, pin == k ? 1.0 : 0.0, pin == k ? 1.0 : 0.0, fmt::format("pin[{},{}]", m, k));
            } else if (!usable) {
                P.add_le({{v, 1.0}}, 0.0, fmt::format("unusable[{},{}]", m, k));
            }
            if (!std::isfinite(radio)) radio = 0.0;  // only reachable through a pin, caught by the rate row
            double radio_ms = radio / kTimeUnit;
            P.add_cost(v, wt * (radio_ms - y * t_loc));
            latency.push_back({v, radio_ms - y * t_loc});
            energy.push_back({v, c.tx_power * radio - y * e_loc});
            rate.push_back({v, r / c.rate_floor - 1.0});
            assoc.push_back({v, 1.0});

            // processing and propagation branches of ES k
            std::vector<Term> cp{{L.tcp(m), 1.0}, {v, -t_es}, {L.ec(m, k), -(t_c - t_es)}};
            P.add_ge(std::move(cp), 0.0, fmt::format("processing[{},{}]", m, k));
            std::vector<Term> pro{{L.tpro(m), 1.0},
                                  {L.ec(m, k), -c.cloud_distance[k] / c.propagation_speed / kTimeUnit}};
            for (int kp = 0; kp < K; ++kp)
                if (kp != k)
                    pro.push_back({L.ee(m, k, kp), -p.scenario.es_distance_at(k, kp) / c.propagation_speed / kTimeUnit});
            P.add_ge(std::move(pro), 0.0, fmt::format("propagation[{},{}]", m, k));

            // service availability, connectivity and transfer
            std::vector<Term> avail{{v, 1.0}, {L.ec(m, k), -1.0}, {L.g(s, k), -1.0}};
            std::vector<Term> conn{{L.ec(m, k), 1.0}, {v, -1.0}};
            for (int kp = 0; kp < K; ++kp) {
                if (kp == k) continue;
                avail.push_back({L.ee(m, k, kp), -1.0});
                conn.push_back({L.ee(m, k, kp), 1.0});
                P.add_le({{L.ee(m, k, kp), 1.0}, {L.g(s, kp), -1.0}}, 0.0, fmt::format("transfer[{},{},{}]", m, k, kp));
            }
            P.add_le(std::move(avail), 0.0, fmt::format("service_availability[{},{}]", m, k));
            P.add_le(std::move(conn), 0.0, fmt::format("connectivity[{},{}]", m, k));
        }
        P.add_cost(L.tcp(m), wt);
        P.add_cost(L.tpro(m), wt);
        P.add_constant(wt * t_loc);
        latency.push_back({L.tcp(m), 1.0});
        latency.push_back({L.tpro(m), 1.0});
        latency.push_back({L.theta, 1.0});
        P.add_le(std::move(latency), task.deadline / kTimeUnit - t_loc, fmt::format("latency[{}]", m));
        P.add_le(std::move(energy), c.energy_cap - e_loc, fmt::format("energy[{}]", m));
        P.add_ge(std::move(rate), 0.0, fmt::format("rate[{}]", m));
        if (p.pins.require_association)
            P.add_eq(std::move(assoc), 1.0, fmt::format("assoc_sum[{}]", m));
        else
            P.add_le(std::move(assoc), 1.0, fmt::format("assoc_sum[{}]", m));
    }
    P.add_cost(L.theta, wt * M);

    // shared haul queue
    for (int k = 0; k < K; ++k) {
        std::vector<Term> haul{{L.theta, 1.0}};
        for (int m = 0; m < M; ++m) {
            double bits = (1.0 - alloc.phi[m]) * p.tasks[m].size;
            haul.push_back({L.ec(m, k), -bits / c.backhaul_rate / kTimeUnit});
            for (int kp = 0; kp < K; ++kp)
                if (kp != k) haul.push_back({L.ee(m, k, kp), -bits / c.fronthaul_rate / kTimeUnit});
        }
        P.add_ge(std::move(haul), 0.0, fmt::format("haul[{}]", k));
    }

    // placement sets and cost
    const auto& pr = c.prices;
    std::vector<Term> cost_cap;
    double cost_const = 0.0;
    for (int k = 0; k < K; ++k) {
        std::vector<Term> count;
        for (int s = 0; s < S; ++s) {
            int v = L.g(s, k);
            count.push_back({v, 1.0});
            double before = p.prev_placement.empty() ? 0.0 : p.prev_placement[static_cast<std::size_t>(s * K + k)];
            P.add_quadratic(wc * 0.5 * (pr.uninstall + pr.install), AffineExpr({{v, 1.0}}, -before));
            P.add_cost(v, wc * (pr.operate - 0.5 * (pr.uninstall - pr.install)));
            P.add_constant(wc * 0.5 * (pr.uninstall - pr.install) * before);
            if (before > 0.5) {
                cost_cap.push_back({v, pr.operate - pr.uninstall});
                cost_const += pr.uninstall;
            } else {
                cost_cap.push_back({v, pr.operate + pr.install});
            }
        }
        P.add_row(std::move(count), 1.0, c.max_services_per_es, fmt::format("services[{}]", k));
    }
    std::vector<Term> cloud;
    for (int m = 0; m < M; ++m)
        for (int k = 0; k < K; ++k) {
            P.add_cost(L.ec(m, k), wc * pr.request);
            cost_cap.push_back({L.ec(m, k), pr.request});
            cloud.push_back({L.ec(m, k), c.cloud_rate});
        }
    P.add_le(std::move(cost_cap), c.cost_cap - cost_const, "cost");
    P.add_le(std::move(cloud), c.cloud_capacity, "cloud_capacity");

    for (int k = 0; k < K; ++k) {
        std::vector<Term> load;
        for (int m = 0; m < M; ++m) {
            load.push_back({L.sigma(m, k), c.es_rate});
            load.push_back({L.ec(m, k), -c.es_rate});
            for (int kp = 0; kp < K; ++kp) {
                if (kp == k) continue;
                load.push_back({L.ee(m, k, kp), -c.es_rate});
                load.push_back({L.ee(m, kp, k), c.es_rate});
            }
        }
        P.add_le(std::move(load), c.es_capacity, fmt::format("es_capacity[{}]", k));
    }

    if (alpha > 0) {
        for (int i = 0; i < L.num_binary; ++i) {
            P.add_cost(i, alpha * (1.0 - 2.0 * anchors[i]));
            P.add_constant(alpha * anchors[i] * anchors[i]);
        }
    }
    return {std::move(P), L};
}

double lsp_objective(const LspProblem& p, const PlacementDecision& d)
{
    SlotContext ctx{p.scenario, p.channel, p.tasks};
    auto alloc = effective_allocation(d, lsp_allocation(p));
    double cost = total_cost(d, p.prev_placement, p.scenario.config.prices).total;
    return objective(ctx, d, alloc, cost);
}

std::vector<Violation> lsp_violations(const LspProblem& p, const PlacementDecision& d)
{
    SlotContext ctx{p.scenario, p.channel, p.tasks};
    auto alloc = effective_allocation(d, lsp_allocation(p));
    auto all = check_feasibility(ctx, d, alloc, p.prev_placement);
    std::vector<Violation> out;
    for (auto& v : all)
        if (!allocation_only(v.id)) out.push_back(std::move(v));
    const int M = d.num_ues;
    for (int m = 0; m < M; ++m) {
        if (!p.pins.assoc.empty() && p.pins.assoc[m] >= 0 && !d.a(m, p.pins.assoc[m]))
            out.push_back({fmt::format("pin[{}]", m), 1.0});
        if (p.pins.require_association && !d.associated(m)) out.push_back({fmt::format("assoc_required[{}]", m), 1.0});
        for (int k = 0; k < d.num_ess; ++k) {
            if (p.pins.no_edge_cloud && d.ec(m, k)) out.push_back({fmt::format("no_edge_cloud[{},{}]", m, k), 1.0});
            if (p.pins.no_edge_edge && d.forwarded(m, k)) out.push_back({fmt::format("no_edge_edge[{},{}]", m, k), 1.0});
        }
    }
    return out;
}

PlacementDecision all_local_decision(const LspProblem& p)
{
    const auto& c = p.scenario.config;
    const int M = c.num_ues, K = c.num_ess, S = c.num_services;
    PlacementDecision d(M, K, S);
    bool keep = !p.prev_placement.empty();
    for (int k = 0; k < K && keep; ++k) {
        int n = 0;
        for (int s = 0; s < S; ++s) n += p.prev_placement[static_cast<std::size_t>(s * K + k)];
        keep = n >= 1 && n <= c.max_services_per_es;
    }
    if (keep) {
        d.placement = p.prev_placement;
        return d;
    }
    std::vector<int> demand(static_cast<std::size_t>(S), 0);
    for (const auto& t : p.tasks) ++demand[t.service];
    int best = static_cast<int>(std::max_element(demand.begin(), demand.end()) - demand.begin());
    for (int k = 0; k < K; ++k) d.g(best, k) = 1;
    return d;
}

namespace {

bool tied(double v) { return std::abs(v - 0.5) < 1e-4; }

// Rounding of x in which ties respect the one-ES, one-route structure:
// a UE keeps its clear association or takes the strongest tied ES, and at
// most one tied route out of that ES.
std::vector<double> tie_lean(const LspProblem& p, const LspLayout& L, const std::vector<double>& x)
{
    auto lean = flatten(L, round_decision(L, x));
    for (int m = 0; m < L.M; ++m) {
        int chosen = -1;
        for (int k = 0; k < L.K; ++k)
            if (!tied(x[L.sigma(m, k)]) && x[L.sigma(m, k)] > 0.5) chosen = k;
        if (chosen < 0)
            for (int k = 0; k < L.K; ++k)
                if (tied(x[L.sigma(m, k)]) && (chosen < 0 || p.channel.gain(m, k) > p.channel.gain(m, chosen)))
                    chosen = k;
        for (int k = 0; k < L.K; ++k) {
            if (tied(x[L.sigma(m, k)])) lean[L.sigma(m, k)] = k == chosen;
            std::vector<int> routes{L.ec(m, k)};
            for (int kp = 0; kp < L.K; ++kp)
                if (kp != k) routes.push_back(L.ee(m, k, kp));
            bool taken = k != chosen;
            for (int i : routes) taken = taken || (!tied(x[i]) && x[i] > 0.5);
            for (int i : routes)
                if (tied(x[i])) {
                    lean[i] = taken ? 0.0 : 1.0;
                    taken = true;
                }
        }
    }
    return lean;
}

}  // namespace

LspResult solve_lsp(const LspProblem& p, const LspOptions& o)
{
    const auto& c = p.scenario.config;
    LspLayout layout(c.num_ues, c.num_ess, c.num_services);
    const double huge = 1e300;

    // anchors of pinned binaries sit on their pinned value
    auto pinned_value = [&](int i) -> int {
        for (int m = 0; m < layout.M; ++m) {
            int pin = p.pins.assoc.empty() ? -1 : p.pins.assoc[m];
            if (pin < 0) continue;
            for (int k = 0; k < layout.K; ++k)
                if (layout.sigma(m, k) == i) return pin == k ? 1 : 0;
        }
        if (p.pins.no_edge_edge && i >= layout.ee0 && i < layout.ec0) return 0;
        if (p.pins.no_edge_cloud && i >= layout.ec0 && i < layout.num_binary) return 0;
        return -1;
    };
    std::vector<int> pinned(static_cast<std::size_t>(layout.num_binary));
    for (int i = 0; i < layout.num_binary; ++i) pinned[i] = pinned_value(i);

    LspResult out;
    for (int attempt = 0; attempt <= o.max_retries; ++attempt) {
        out.attempts = attempt + 1;
        out.trace.clear();
        out.converged = false;
        auto rng = make_stream(o.seed, Stream::anchor, {o.key, static_cast<std::uint64_t>(attempt)});
        double spread = attempt == 0 ? o.anchor_spread : o.retry_spread;
        std::uniform_real_distribution<double> U(0.5 - spread, 0.5 + spread);
        std::vector<double> anchor(static_cast<std::size_t>(layout.num_binary));
        for (int i = 0; i < layout.num_binary; ++i) {
            double u = U(rng);
            anchor[i] = pinned[i] >= 0 ? pinned[i] : u;
        }

        double prev = huge;
        bool relaxation_infeasible = false;
        for (int it = 1; it <= o.max_iterations; ++it) {
            auto model = build_lsp_program(p, anchor, o.alpha, o.objective_scale);
            auto sol = solve(model.program, o.solver);
            if (sol.status != SolveStatus::optimal) {
                relaxation_infeasible = sol.status == SolveStatus::infeasible && it == 1;
                break;
            }
            std::vector<double> delta(sol.x.begin(), sol.x.begin() + layout.num_binary);
            double frac = 0.0;
            for (auto& v : delta) {
                v = std::clamp(v, 0.0, 1.0);
                frac = std::max(frac, std::min(v, 1.0 - v));
            }
            out.trace.push_back({it, sol.objective, penalty(delta), frac});
            anchor = delta;
            const bool settled =
                prev < huge && std::abs(prev - sol.objective) <= o.tolerance * std::max(std::abs(prev), 1e-12);
            prev = sol.objective;
            // the surrogate has no slope at 0.5, so a binary left there never
            // moves; once the rest has settled, lean it towards the rounding
            bool nudged = false;
            if (settled) {
                const auto lean = tie_lean(p, layout, anchor);
                for (int i = 0; i < layout.num_binary; ++i)
                    if (pinned[i] < 0 && tied(anchor[i])) {
                        anchor[i] = 0.5 + (lean[i] > 0.5 ? o.tie_break : -o.tie_break);
                        nudged = true;
                    }
            }
            if (settled && !nudged) {
                out.converged = true;
                break;
            }
        }
        if (relaxation_infeasible) break;
        if (out.trace.empty()) continue;

        auto d = round_decision(layout, anchor);
        if (lsp_violations(p, d).empty()) {
            out.decision = std::move(d);
            out.objective = lsp_objective(p, out.decision);
            return out;
        }
    }

    out.fallback = true;
    out.decision = all_local_decision(p);
    out.report = lsp_violations(p, out.decision);
    out.objective = lsp_objective(p, out.decision);
    return out;
}

}  // namespace hecc
