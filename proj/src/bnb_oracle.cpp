#include "hecc/bnb_oracle.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace hecc {

namespace {

struct Incumbent {
    std::vector<double> x;
    double value = kInf;

    // strict improvement, or a tie won by the lexicographically smaller vector
    bool offer(const std::vector<double>& cand, double v)
    {
        if (x.empty()) {
            x = cand;
            value = v;
            return true;
        }
        double tie = 1e-12 * std::max(1.0, std::abs(value));
        if (v < value - tie || (std::abs(v - value) <= tie && cand < x)) {
            x = cand;
            value = v;
            return true;
        }
        return false;
    }
};

// Fixed value per binary from the scheme pins, -1 when free.
std::vector<int> pinned_values(const LspProblem& p, const LspLayout& L)
{
    std::vector<int> fix(static_cast<std::size_t>(L.num_binary), -1);
    for (int m = 0; m < L.M; ++m) {
        int pin = p.pins.assoc.empty() ? -1 : p.pins.assoc[m];
        if (pin < 0) continue;
        for (int k = 0; k < L.K; ++k) fix[L.sigma(m, k)] = pin == k ? 1 : 0;
    }
    if (p.pins.no_edge_edge)
        for (int i = L.ee0; i < L.ec0; ++i) fix[i] = 0;
    if (p.pins.no_edge_cloud)
        for (int i = L.ec0; i < L.num_binary; ++i) fix[i] = 0;
    return fix;
}

// Cheap structural screen before the full check.
bool plausible(const LspLayout& L, const std::vector<double>& x)
{
    for (int m = 0; m < L.M; ++m) {
        double assoc = 0.0;
        for (int k = 0; k < L.K; ++k) {
            double sig = x[L.sigma(m, k)];
            assoc += sig;
            double out = x[L.ec(m, k)];
            for (int kp = 0; kp < L.K; ++kp)
                if (kp != k) out += x[L.ee(m, k, kp)];
            if (out > sig) return false;
        }
        if (assoc > 1.0) return false;
    }
    return true;
}

OracleResult exhaustive(const LspProblem& p, const LspLayout& L, const OracleOptions& o)
{
    auto fix = pinned_values(p, L);
    std::vector<int> free;
    for (int i = 0; i < L.num_binary; ++i)
        if (fix[i] < 0) free.push_back(i);
    if (free.size() >= 63 || (1ull << free.size()) > o.max_combinations)
        throw std::invalid_argument(fmt::format(
            "exhaustive oracle: 2^{} combinations exceed the limit of {}; use bnb mode", free.size(), o.max_combinations));

    OracleResult r;
    Incumbent best;
    std::vector<double> x(static_cast<std::size_t>(L.num_binary));
    for (int i = 0; i < L.num_binary; ++i) x[i] = fix[i] > 0 ? 1.0 : 0.0;
    const std::uint64_t total = 1ull << free.size();
    for (std::uint64_t code = 0; code < total; ++code) {
        for (std::size_t j = 0; j < free.size(); ++j) x[free[j]] = static_cast<double>((code >> j) & 1u);
        ++r.nodes;
        if (!plausible(L, x)) continue;
        auto d = round_decision(L, x);
        if (!lsp_violations(p, d).empty()) continue;
        best.offer(x, lsp_objective(p, d));
    }
    if (std::isfinite(best.value)) {
        r.feasible = true;
        r.decision = round_decision(L, best.x);
        r.objective = best.value;
    }
    return r;
}

int branch_variable(const LspLayout& L, const std::vector<double>& x, const std::vector<int>& fix, double tol)
{
    const int order[4][2] = {{L.g0, L.ee0}, {L.sigma0, L.g0}, {L.ee0, L.ec0}, {L.ec0, L.num_binary}};
    for (const auto& tier : order) {
        int pick = -1;
        double best = tol;
        for (int i = tier[0]; i < tier[1]; ++i) {
            if (fix[i] >= 0) continue;
            double f = std::min(x[i], 1.0 - x[i]);
            if (f > best + 1e-12) {
                best = f;
                pick = i;
            }
        }
        if (pick >= 0) return pick;
    }
    return -1;
}

OracleResult branch_and_bound(const LspProblem& p, const LspLayout& L, const OracleOptions& o)
{
    OracleResult r;
    Incumbent best;
    const std::vector<double> zeros(static_cast<std::size_t>(L.num_binary), 0.0);

    auto leaf = [&](const std::vector<double>& x) {
        auto d = round_decision(L, x);
        if (!lsp_violations(p, d).empty()) return;
        best.offer(flatten(L, d), lsp_objective(p, d));
    };

    std::vector<std::vector<int>> stack{pinned_values(p, L)};
    while (!stack.empty()) {
        auto fix = std::move(stack.back());
        stack.pop_back();
        if (r.nodes >= o.max_nodes) {
            r.complete = false;
            break;
        }
        ++r.nodes;

        auto model = build_lsp_program(p, zeros, 0.0, 1.0);
        bool all_fixed = true;
        for (int i = 0; i < L.num_binary; ++i) {
            if (fix[i] >= 0)
                model.program.set_bounds(i, fix[i], fix[i]);
            else
                all_fixed = false;
        }
        auto sol = solve(model.program, o.solver);
        if (sol.status == SolveStatus::infeasible) continue;

        std::vector<double> x(sol.x.begin(), sol.x.begin() + L.num_binary);
        for (int i = 0; i < L.num_binary; ++i) {
            x[i] = std::clamp(x[i], 0.0, 1.0);
            if (fix[i] >= 0) x[i] = fix[i];
        }
        if (all_fixed) {
            leaf(x);
            continue;
        }
        const bool bounded = sol.status == SolveStatus::optimal;
        if (bounded && !best.x.empty() && sol.objective >= best.value - 1e-9 * std::abs(best.value)) continue;

        int v = bounded ? branch_variable(L, x, fix, o.integrality_tol) : -1;
        if (v < 0 && bounded) {
            // integral relaxation: its rounding is optimal for the subtree
            auto d = round_decision(L, x);
            if (lsp_violations(p, d).empty()) {
                best.offer(flatten(L, d), lsp_objective(p, d));
                continue;
            }
        }
        for (int i = 0; i < L.num_binary && v < 0; ++i)
            if (fix[i] < 0) v = i;
        int first = x[v] >= 0.5 ? 1 : 0;
        auto a = fix, b = fix;
        a[v] = 1 - first;
        b[v] = first;
        stack.push_back(std::move(a));  // explored second
        stack.push_back(std::move(b));
    }
    if (std::isfinite(best.value)) {
        r.feasible = true;
        r.decision = round_decision(L, best.x);
        r.objective = best.value;
    }
    return r;
}

}  // namespace

OracleResult solve_oracle(const LspProblem& p, const OracleOptions& o)
{
    const auto& c = p.scenario.config;
    LspLayout L(c.num_ues, c.num_ess, c.num_services);
    return o.mode == OracleMode::exhaustive ? exhaustive(p, L, o) : branch_and_bound(p, L, o);
}

}  // namespace hecc
