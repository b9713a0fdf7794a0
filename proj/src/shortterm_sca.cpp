#include "hecc/shortterm_sca.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

namespace hecc {

namespace {

constexpr double kTimeUnit = 1e-3;  // latency rows in ms
constexpr double kRateUnit = 1e7;   // rate variables in 10 Mbit/s
constexpr double kMinShare = 1e-6;
constexpr double kMinOffload = 1e-3;
constexpr double kMargin = 1e-4;  // caps and floors are tightened by this fraction

bool allocation_related(const std::string& id)
{
    for (const char* p : {"latency", "energy", "rate", "bandwidth", "phi_", "coupling"})
        if (id.starts_with(p)) return true;
    return false;
}

// One associated UE and the constants of its route.
struct Link {
    int m = 0;
    int k = 0;
    double a0 = 0.0;      // P·gain/(W·N0)
    double t_loc = 0.0;   // ms, whole task at the UE
    double t_off = 0.0;   // ms, whole task where it is served
    double pro = 0.0;     // ms, propagation
    double haul = 0.0;    // ms per unit offloaded fraction on the shared queue of ES k
    bool hauled = false;
};

struct Iterate {
    std::vector<double> phi, b;  // per link
};

struct Vars {
    int phi, b, r, u, w, q;
};

Vars vars_of(int j) { return {6 * j, 6 * j + 1, 6 * j + 2, 6 * j + 3, 6 * j + 4, 6 * j + 5}; }

double exact_rate(double b, double a0, double bandwidth)
{
    return b * bandwidth / std::numbers::ln2 * std::log1p(a0 / b);
}

std::vector<Link> links_of(const SlotContext& ctx, const PlacementDecision& d)
{
    const auto& c = ctx.config();
    auto pro = propagation_delay(ctx.scenario, d, services_of(ctx.tasks));
    std::vector<Link> out;
    for (int m = 0; m < d.num_ues; ++m) {
        int k = d.serving_es(m);
        if (k < 0) continue;
        const auto& task = ctx.tasks[m];
        Link l;
        l.m = m;
        l.k = k;
        l.a0 = c.tx_power * ctx.channel.gain(m, k) / (c.bandwidth * c.noise_density);
        l.t_loc = task.cycles / c.ue_rate / kTimeUnit;
        l.t_off = task.cycles / (d.ec(m, k) ? c.cloud_rate : c.es_rate) / kTimeUnit;
        l.pro = pro[m] / kTimeUnit;
        if (d.ec(m, k)) {
            l.haul = task.size / c.backhaul_rate / kTimeUnit;
            l.hauled = true;
        } else if (d.forwarded(m, k)) {
            l.haul = d.forwarded(m, k) * task.size / c.fronthaul_rate / kTimeUnit;
            l.hauled = true;
        }
        out.push_back(l);
    }
    return out;
}

AllocationDecision to_allocation(int M, const std::vector<Link>& links, const Iterate& x)
{
    AllocationDecision a{std::vector<double>(static_cast<std::size_t>(M), 1.0),
                         std::vector<double>(static_cast<std::size_t>(M), 0.0)};
    for (std::size_t j = 0; j < links.size(); ++j) {
        a.phi[links[j].m] = x.phi[j];
        a.b[links[j].m] = x.b[j];
    }
    return a;
}

bool usable(const ConicSolution& s)
{
    if (s.status == SolveStatus::optimal) return true;
    if (s.status != SolveStatus::iteration_limit || s.x.empty()) return false;
    for (double v : s.x)
        if (!std::isfinite(v)) return false;
    return true;
}

double max_residual(const SlotContext& ctx, const PlacementDecision& d, const AllocationDecision& a)
{
    double worst = 0.0;
    for (const auto& v : check_feasibility(ctx, d, a, {}, 0.0))
        if (allocation_related(v.id)) worst = std::max(worst, std::isnan(v.residual) ? kInf : v.residual);
    return worst;
}

// Convex inner model around `at`. With `restore` the objective is the
// relative violation v of the latency, energy and rate rows.
ConicProgram build(const SlotContext& ctx, const PlacementDecision& d, const std::vector<Link>& links, const Iterate& at,
                   const AllocationPins& pins, bool restore)
{
    const auto& c = ctx.config();
    const int M = d.num_ues, K = d.num_ess;
    const int J = static_cast<int>(links.size());
    const double cw = c.bandwidth / std::numbers::ln2 / kRateUnit;
    const double floor = c.rate_floor / kRateUnit * (1 + kMargin);
    const double energy_cap = c.energy_cap * (1 - kMargin);
    const double wt = c.weight_latency;

    ConicProgram P;
    for (int j = 0; j < J; ++j) {
        double plo = pins.phi ? *pins.phi : 0.0, phi_hi = pins.phi ? *pins.phi : 1.0;
        double blo = pins.bandwidth ? *pins.bandwidth : kMinShare, bhi = pins.bandwidth ? *pins.bandwidth : 1.0;
        P.add_variable(fmt::format("phi[{}]", links[j].m), plo, phi_hi);
        P.add_variable(fmt::format("b[{}]", links[j].m), blo, bhi);
        P.add_variable(fmt::format("r[{}]", links[j].m), 0.0);
        P.add_variable(fmt::format("u[{}]", links[j].m), 0.0);
        P.add_variable(fmt::format("w[{}]", links[j].m), 0.0);
        P.add_variable(fmt::format("q[{}]", links[j].m), 0.0);
    }
    const int theta = P.add_variable("theta", 0.0);
    const int v = restore ? P.add_variable("violation", 0.0, kInf, 1.0) : -1;
    auto relax = [&](std::vector<Term> t, double cap) {
        if (v >= 0) t.push_back({v, -cap});
        return t;
    };

    std::vector<Term> share;
    for (int j = 0; j < J; ++j) {
        const auto& l = links[j];
        const auto& task = ctx.tasks[l.m];
        const Vars x = vars_of(j);
        const double bb = at.b[j];
        const double ell = std::log1p(l.a0 / bb);
        const double q0 = bb * l.a0 / (l.a0 + bb);
        const double rbar = kRateUnit / exact_rate(bb, l.a0, c.bandwidth);
        const double ybar = std::max(1.0 - at.phi[j], kMinOffload);

        // u <= R_lb(b), R_lb(b) >= R_min, w >= b̄/b, r >= 1/u
        P.add_le({{x.u, 1.0}, {x.b, cw * q0 / bb}, {x.w, cw * ell * bb}}, cw * (2.0 * bb * ell + q0),
                 fmt::format("rate_bound[{}]", l.m));
        P.add_le(relax({{x.b, cw * q0 / bb}, {x.w, cw * ell * bb}}, floor), cw * (2.0 * bb * ell + q0) - floor,
                 fmt::format("rate[{}]", l.m));
        P.add_rotated(AffineExpr({{x.w, 1.0}}), AffineExpr({{x.b, 0.5 / bb}}), {AffineExpr(1.0)},
                      fmt::format("inverse_share[{}]", l.m));
        P.add_rotated(AffineExpr({{x.r, 1.0 / rbar}}), AffineExpr({{x.u, 0.5 * rbar}}), {AffineExpr(1.0)},
                      fmt::format("inverse_rate[{}]", l.m));
        // q/r̄ >= ½(y²/ȳ + ȳ(r/r̄)²) >= y·r/r̄ with y = 1 - phi
        const double sy = 1.0 / std::sqrt(ybar), sr = std::sqrt(ybar) / rbar;
        P.add_rotated(AffineExpr({{x.q, 1.0 / rbar}}), AffineExpr(1.0),
                      {AffineExpr({{x.phi, -sy}}, sy), AffineExpr({{x.r, sr}})},
                      fmt::format("bilinear[{}]", l.m));

        const double radio = task.size / kRateUnit / kTimeUnit;  // ms per unit of y·r
        const double cap = task.deadline / kTimeUnit * (1 - kMargin);
        P.add_le(relax({{x.phi, l.t_loc - l.t_off}, {x.q, radio}, {theta, 1.0}}, cap), cap - l.t_off - l.pro,
                 fmt::format("latency[{}]", l.m));
        const double e_loc = 0.5 * c.capacitance * task.cycles * c.ue_rate * c.ue_rate;
        P.add_le(relax({{x.phi, e_loc}, {x.q, c.tx_power * task.size / kRateUnit}}, energy_cap), energy_cap,
                 fmt::format("energy[{}]", l.m));
        share.push_back({x.b, 1.0});

        if (!restore) {
            P.add_cost(x.phi, wt * (l.t_loc - l.t_off));
            P.add_cost(x.q, wt * radio);
            P.add_constant(wt * (l.t_off + l.pro));
        }
    }
    std::vector<bool> assoc(static_cast<std::size_t>(M), false);
    for (const auto& l : links) assoc[l.m] = true;
    for (int m = 0; m < M; ++m) {
        if (assoc[m]) continue;
        const double t_loc = ctx.tasks[m].cycles / c.ue_rate / kTimeUnit;
        const double cap = ctx.tasks[m].deadline / kTimeUnit * (1 - kMargin);
        P.add_le(relax({{theta, 1.0}}, cap), cap - t_loc, fmt::format("latency[{}]", m));
        if (!restore) P.add_constant(wt * t_loc);
    }
    if (!restore) P.add_cost(theta, wt * M);
    if (!pins.bandwidth && !share.empty()) P.add_le(std::move(share), 1.0, "bandwidth_sum");

    for (int k = 0; k < K; ++k) {
        std::vector<Term> haul{{theta, 1.0}};
        double total = 0.0;
        for (int j = 0; j < J; ++j)
            if (links[j].hauled && links[j].k == k) {
                haul.push_back({vars_of(j).phi, links[j].haul});
                total += links[j].haul;
            }
        if (haul.size() > 1) P.add_ge(std::move(haul), total, fmt::format("haul[{}]", k));
    }
    return P;
}

}  // namespace

double rate_lower_bound(double b, double bb, double a0, double bandwidth)
{
    if (!(b > 0) || !(bb > 0) || !(a0 > 0)) throw std::invalid_argument("rate_lower_bound: arguments must be positive");
    const double ell = std::log1p(a0 / bb);
    const double q0 = bb * a0 / (a0 + bb);
    return bandwidth / std::numbers::ln2 * (2.0 * bb * ell + q0 - q0 / bb * b - ell * bb * bb / b);
}

double bilinear_upper_bound(double y, double z, double ya, double za)
{
    if (!(ya > 0) || !(za > 0)) throw std::invalid_argument("bilinear_upper_bound: anchors must be positive");
    return 0.5 * (za / ya * y * y + ya / za * z * z);
}

std::vector<Violation> allocation_violations(const SlotContext& ctx, const PlacementDecision& d,
                                             const AllocationDecision& alloc)
{
    std::vector<Violation> out;
    for (auto& v : check_feasibility(ctx, d, alloc, {}))
        if (allocation_related(v.id)) out.push_back(std::move(v));
    return out;
}

SspResult solve_ssp(const SlotContext& ctx, const PlacementDecision& d, double cost, const AllocationPins& pins,
                    const SspOptions& o)
{
    const int M = d.num_ues;
    if (static_cast<int>(ctx.tasks.size()) != M) throw std::invalid_argument("solve_ssp: task count mismatch");
    const auto links = links_of(ctx, d);
    const int J = static_cast<int>(links.size());

    Iterate x;
    for (int j = 0; j < J; ++j) {
        x.phi.push_back(pins.phi ? *pins.phi : 0.5);
        x.b.push_back(pins.bandwidth ? *pins.bandwidth : 1.0 / J);
    }

    SspResult out;
    auto alloc = to_allocation(M, links, x);
    auto read = [&](const ConicSolution& s) {
        Iterate p;
        for (int j = 0; j < J; ++j) {
            p.phi.push_back(pins.phi ? *pins.phi : std::clamp(s.x[vars_of(j).phi], 0.0, 1.0));
            p.b.push_back(pins.bandwidth ? *pins.bandwidth : std::clamp(s.x[vars_of(j).b], kMinShare, 1.0));
        }
        return p;
    };

    if (!allocation_violations(ctx, d, alloc).empty() && J > 0) {
        out.restored = true;
        for (int it = 0; it < o.restoration_iterations; ++it) {
            auto s = solve(build(ctx, d, links, x, pins, true), o.solver);
            if (!usable(s)) break;
            x = read(s);
            alloc = to_allocation(M, links, x);
            if (allocation_violations(ctx, d, alloc).empty()) break;
        }
    }
    out.allocation = alloc;
    out.report = allocation_violations(ctx, d, alloc);
    if (!out.report.empty()) {
        out.trace.push_back({0, objective(ctx, d, alloc, cost), max_residual(ctx, d, alloc)});
        return out;
    }

    double prev = objective(ctx, d, alloc, cost);
    out.trace.push_back({0, prev, max_residual(ctx, d, alloc)});
    for (int it = 1; it <= o.max_iterations && J > 0; ++it) {
        auto s = solve(build(ctx, d, links, x, pins, false), o.solver);
        // a stalled solve is still usable: the candidate is re-checked on the exact model below
        if (!usable(s)) break;
        Iterate next = read(s);
        auto cand = to_allocation(M, links, next);
        double value = objective(ctx, d, cand, cost);
        // numerical noise can push a boundary point just outside; keep the last feasible iterate
        if (!allocation_violations(ctx, d, cand).empty()) break;
        if (value > prev) break;
        x = next;
        alloc = cand;
        out.trace.push_back({it, value, max_residual(ctx, d, alloc)});
        bool done = std::abs(prev - value) <= o.tolerance * std::abs(prev);
        prev = value;
        if (done) {
            out.converged = true;
            break;
        }
    }
    if (J == 0) out.converged = true;
    out.allocation = alloc;
    out.objective = prev;
    out.feasible = true;
    return out;
}

}  // namespace hecc
