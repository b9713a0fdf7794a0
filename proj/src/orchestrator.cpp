#include "hecc/orchestrator.hpp"

#include <numeric>

namespace hecc {

namespace {

LspProblem make_lsp(const Scenario& sc, const ChannelState& ch, const std::vector<TaskSpec>& tasks,
                    const AllocationDecision& alloc, const std::vector<std::uint8_t>& prev, const SchemeSetup& setup)
{
    return {sc, ch, tasks, pin_allocation(alloc, setup.allocation), prev, setup.placement};
}

bool honours_pins(const PlacementDecision& d, const PlacementPins& pins)
{
    if (!pins.require_association) return true;
    for (int m = 0; m < d.num_ues; ++m)
        if (!d.associated(m)) return false;
    return true;
}

}  // namespace

AllocationDecision initial_allocation(const Scenario& sc, const RunOptions& o)
{
    const int M = sc.num_ues();
    const auto ch = draw_channel_state(sc, 0, 0);
    const auto tasks = draw_tasks(sc, requests_for_frame(sc, 0), 0, 0);
    auto setup = apply_scheme(o.scheme, sc, ch, 0);
    if (setup.placement.assoc.empty()) setup.placement.assoc = strongest_association(ch);

    AllocationDecision start{std::vector<double>(M, 0.5), std::vector<double>(M, 1.0 / M)};
    auto p = make_lsp(sc, ch, tasks, start, {}, setup);
    auto l = solve_lsp(p, o.lsp);
    const double cost = total_cost(l.decision, {}, sc.config.prices).total;
    auto s = solve_ssp({sc, ch, tasks}, l.decision, cost, setup.allocation, o.ssp);
    return s.allocation;
}

RunTrace run(const Scenario& sc, const RunOptions& o)
{
    const auto& c = sc.config;
    RunTrace out;
    out.scheme = o.scheme;
    out.seed = c.seed;

    AllocationDecision alloc = initial_allocation(sc, o);
    PlacementDecision d;
    std::vector<std::uint8_t> installed;  // placement before the current frame
    SchemeSetup setup;
    RequestState requests = requests_for_frame(sc, 0);
    CostAverager costs;
    bool flag = true;

    for (int t = 0; t < c.frames; ++t) {
        auto now = requests_for_frame(sc, t);
        if (now.service_of_ue != requests.service_of_ue) flag = true;
        requests = std::move(now);

        const bool trigger = flag;
        int lsp_iterations = 0;
        bool fallback = false;
        std::vector<std::uint8_t> basis;  // placement the frame cost is charged against
        if (trigger) {
            const auto ch = draw_channel_state(sc, t, 0);
            const auto tasks = draw_tasks(sc, requests, t, 0);
            setup = apply_scheme(o.scheme, sc, ch, t);
            auto lo = o.lsp;
            lo.key = static_cast<std::uint64_t>(t);
            auto l = solve_lsp(make_lsp(sc, ch, tasks, alloc, installed, setup), lo);
            lsp_iterations = static_cast<int>(l.trace.size());
            fallback = l.fallback;
            d = std::move(l.decision);
            basis = installed;
            ++out.triggers;
            flag = false;
        } else {
            basis = d.placement;
        }
        const double cost = total_cost(d, basis, c.prices).total;
        installed = d.placement;
        costs.add(cost);
        out.frame_costs.push_back(cost);
        out.placements.push_back(d);
        out.cost_basis.push_back(basis);

        for (int j = 0; j < c.slots_per_frame; ++j) {
            const auto ch = draw_channel_state(sc, t, j);
            const auto tasks = draw_tasks(sc, requests, t, j);
            const SlotContext ctx{sc, ch, tasks};
            auto s = solve_ssp(ctx, d, cost, setup.allocation, o.ssp);
            if (s.feasible) alloc = s.allocation;

            SlotRecord r;
            r.frame = t;
            r.slot = j;
            r.trigger = trigger && j == 0;
            r.cost_total = cost;
            r.lsp_iterations = j == 0 ? lsp_iterations : 0;
            r.lsp_fallback = fallback;
            r.ssp_iterations = static_cast<int>(s.trace.size());

            const auto eff = effective_allocation(d, s.allocation);
            bool late = false;
            const auto e2e = e2e_latency(ctx, d, s.allocation);
            for (std::size_t m = 0; m < e2e.size(); ++m) {
                r.latency.push_back(e2e[m].e2e);
                late = late || e2e[m].e2e > tasks[m].deadline * (1 + kFeasibilityTol);
            }
            r.energy = ue_energies(ctx, d, s.allocation);
            r.latency_total = std::accumulate(r.latency.begin(), r.latency.end(), 0.0);
            r.objective = c.weight_latency * r.latency_total + c.weight_cost * cost;
            r.offload_mean = 0.0;
            for (double phi : eff.phi) r.offload_mean += (1.0 - phi) / static_cast<double>(eff.phi.size());
            r.feasible = s.feasible && !late && honours_pins(d, setup.placement) &&
                         check_feasibility(ctx, d, s.allocation, basis).empty();
            r.allocation = s.allocation;
            out.slots.push_back(std::move(r));

            if (!s.feasible || late) {
                flag = true;
                break;
            }
        }
    }
    out.average_cost = costs.average();
    return out;
}

}  // namespace hecc
