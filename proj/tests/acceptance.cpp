// Acceptance checks. One PASS/FAIL line per criterion; exit status 1 if any fail.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include <fmt/format.h>

#include "hecc/bnb_oracle.hpp"
#include "hecc/config.hpp"
#include "hecc/experiments.hpp"

using namespace hecc;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::max(std::abs(a), std::abs(b))); }

bool close(const std::vector<double>& a, const std::vector<double>& b, double tol)
{
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!close(a[i], b[i], tol)) return false;
    return true;
}

struct Verdict {
    bool pass = false;
    std::string detail;
};

// ---------------------------------------------------------------------------

// Every structurally feasible decision: per UE one of {local, k, k->k', k->cloud},
// every placement pattern, every service assignment.
Verdict equivalence()
{
    const auto t0 = Clock::now();
    long checked = 0, bad = 0;
    for (int M = 1; M <= 3; ++M)
        for (int K = 1; K <= 2; ++K)
            for (int S = 1; S <= 2; ++S) {
                ScenarioConfig c;
                c.num_ues = M;
                c.num_ess = K;
                c.num_services = S;
                c.max_services_per_es = S;
                c.seed = 7;
                const auto sc = make_scenario(c);
                const auto ch = draw_channel_state(sc, 0, 0);
                auto tasks = draw_tasks(sc, requests_for_frame(sc, 0), 0, 0);
                std::mt19937_64 rng(3);
                std::uniform_real_distribution<double> u(0.05, 0.95);
                AllocationDecision al;
                for (int m = 0; m < M; ++m) {
                    al.phi.push_back(u(rng));
                    al.b.push_back(1.0 / M);
                }
                const int routes = 1 + K * (K + 1);  // local, or (k, none | k' != k | cloud)
                int svc_codes = 1, ue_codes = 1;
                for (int m = 0; m < M; ++m) svc_codes *= S, ue_codes *= routes;
                for (int sv = 0; sv < svc_codes; ++sv) {
                    std::vector<int> svc;
                    for (int m = 0, x = sv; m < M; ++m, x /= S) svc.push_back(x % S);
                    for (int m = 0; m < M; ++m) tasks[m].service = svc[m];
                    const SlotContext ctx{sc, ch, tasks};
                    for (int place = 0; place < (1 << (S * K)); ++place)
                        for (int uc = 0; uc < ue_codes; ++uc) {
                            PlacementDecision d(M, K, S);
                            for (int i = 0; i < S * K; ++i) d.placement[i] = (place >> i) & 1;
                            for (int m = 0, x = uc; m < M; ++m, x /= routes) {
                                const int r = x % routes;
                                if (r == 0) continue;
                                const int k = (r - 1) / (K + 1), how = (r - 1) % (K + 1);
                                d.a(m, k) = 1;
                                if (how == K) d.ec(m, k) = 1;
                                else if (how != k) d.ee(m, k, how) = 1;
                            }
                            if (!structural_violations(d, svc, S).empty()) continue;
                            ++checked;
                            const auto lc = compute_loads(sc, d, svc, Form::coupled);
                            const auto ls = compute_loads(sc, d, svc, Form::simplified);
                            const auto hc = backhaul_fronthaul_delays(ctx, d, al, Form::coupled);
                            const auto hs = backhaul_fronthaul_delays(ctx, d, al, Form::simplified);
                            bool ok = close(lc.es, ls.es, 1e-12) && close(lc.cloud, ls.cloud, 1e-12) &&
                                      close(hc.backhaul, hs.backhaul, 1e-12) && close(hc.fronthaul, hs.fronthaul, 1e-12);
                            for (Reduce r : {Reduce::max, Reduce::sum}) {
                                ok = ok && close(propagation_delay(sc, d, svc, Form::coupled, r),
                                                 propagation_delay(sc, d, svc, Form::simplified), 1e-12);
                                ok = ok && close(total_processing_delay(ctx, d, al, Form::coupled, r),
                                                 total_processing_delay(ctx, d, al, Form::simplified), 1e-12);
                            }
                            bad += !ok;
                        }
                }
            }
    const double dt = seconds_since(t0);
    return {bad == 0 && checked > 0 && dt < 10.0,
            fmt::format("{} feasible decisions, {} mismatches, {:.2f}s", checked, bad, dt)};
}

Verdict cost_table()
{
    const Prices p;
    const double want[3] = {0.05, 0.0, 0.1};
    bool ok = true;
    for (int lambda = -1; lambda <= 1; ++lambda) {
        const int now = lambda == 1 ? 1 : 0, prev = lambda == -1 ? 1 : 0;
        ok = ok && status_change_cost(now, prev, p.install, p.uninstall) == want[lambda + 1];
    }
    ok = ok && status_change_cost(1, 1, p.install, p.uninstall) == 0.0;
    return {ok, "lambda -1,0,1 -> 0.05,0,0.1"};
}

Verdict surrogates()
{
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> lb(-5.0, 0.0), la(0.0, 7.0), u(0.0, 1.0), e(-4.0, 2.0);
    const double W = ScenarioConfig{}.bandwidth;
    const auto exact = [&](double b, double a0) { return b * W / std::numbers::ln2 * std::log1p(a0 / b); };
    long rate_bad = 0, prod_bad = 0;
    double worst_tight = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double b = std::pow(10.0, lb(rng)), bb = std::pow(10.0, lb(rng)), a0 = std::pow(10.0, la(rng));
        rate_bad += rate_lower_bound(b, bb, a0, W) > exact(b, a0) * (1 + 1e-12);
        worst_tight = std::max(worst_tight, std::abs(rate_lower_bound(bb, bb, a0, W) / exact(bb, a0) - 1));
    }
    for (int i = 0; i < 10000; ++i) {
        const double y = u(rng), z = std::pow(10.0, e(rng));
        const double ya = std::max(u(rng), 1e-6), za = std::pow(10.0, e(rng));
        prod_bad += bilinear_upper_bound(y, z, ya, za) < y * z * (1 - 1e-12);
        worst_tight = std::max(worst_tight, std::abs(bilinear_upper_bound(ya, za, ya, za) / (ya * za) - 1));
    }
    return {rate_bad == 0 && prod_bad == 0 && worst_tight <= 1e-9,
            fmt::format("rate violations {}, product violations {}, worst anchor gap {:.1e}", rate_bad, prod_bad,
                        worst_tight)};
}

Verdict longterm_convergence()
{
    const auto t0 = Clock::now();
    const auto sc = make_scenario(ScenarioConfig{});
    const auto ch = draw_channel_state(sc, 0, 0);
    const auto tasks = draw_tasks(sc, requests_for_frame(sc, 0), 0, 0);
    const auto alloc = initial_allocation(sc, {});
    LspOptions o;
    o.alpha = 1e4;
    const auto r = solve_lsp({sc, ch, tasks, alloc, {}, {}}, o);
    bool mono = true;
    for (std::size_t i = 1; i < r.trace.size(); ++i)
        mono = mono && r.trace[i].objective <= r.trace[i - 1].objective + 1e-9 * std::abs(r.trace[i - 1].objective);
    const double pen = r.trace.empty() ? kInf : r.trace.back().penalty;
    const double dt = seconds_since(t0);
    return {mono && r.converged && !r.fallback && r.trace.size() <= 10 && pen < 1e-3 && dt < 30.0,
            fmt::format("{} iterations, monotone {}, converged {}, fallback {}, penalty {:.1e}, {:.2f}s",
                        r.trace.size(), mono, r.converged, r.fallback, pen, dt)};
}

Verdict oracle()
{
    const auto t0 = Clock::now();
    double worst = 0.0, mean = 0.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        ScenarioConfig c;
        c.num_ues = 4;
        c.num_ess = 2;
        c.num_services = 3;
        c.max_services_per_es = 3;
        c.frames = 1;
        c.seed = seed;
        const auto g = oracle_gap(c);
        const double gap = std::stod(g.gap.rows.at(0).at(3));
        worst = std::max(worst, gap);
        mean += gap / 10;
    }
    const double dt = seconds_since(t0);
    return {worst <= 5.0 && dt < 300.0, fmt::format("mean gap {:.3f}%, worst {:.3f}%, {:.1f}s", mean, worst, dt)};
}

Verdict shortterm_convergence()
{
    std::string detail;
    bool ok = true;
    for (auto [M, K] : {std::pair{8, 2}, {10, 2}, {10, 4}}) {
        ScenarioConfig c;
        c.num_ues = M;
        c.num_ess = K;
        const auto sc = make_scenario(c);
        const auto ch = draw_channel_state(sc, 0, 0);
        const auto tasks = draw_tasks(sc, requests_for_frame(sc, 0), 0, 0);
        const SlotContext ctx{sc, ch, tasks};
        // every UE on its strongest ES so that all allocation variables are live
        LspProblem p{sc, ch, tasks, {std::vector<double>(M, 0.5), std::vector<double>(M, 1.0 / M)}, {}, {}};
        p.pins.assoc = strongest_association(ch);
        const auto l = solve_lsp(p);
        const auto s = solve_ssp(ctx, l.decision, total_cost(l.decision, {}, c.prices).total);
        bool mono = true;
        for (std::size_t i = 1; i < s.trace.size(); ++i)
            mono = mono && s.trace[i].objective <= s.trace[i - 1].objective * (1 + 1e-9);
        const bool feasible = s.feasible && allocation_violations(ctx, l.decision, s.allocation).empty();
        ok = ok && mono && s.converged && feasible && s.trace.size() <= 51;
        detail += fmt::format("({},{}): {} it{}{}{}; ", M, K, s.trace.size() - 1, mono ? "" : " non-monotone",
                              s.converged ? "" : " unconverged", feasible ? "" : " infeasible");
    }
    return {ok, detail};
}

Verdict benchmark_ordering()
{
    const auto t0 = Clock::now();
    ExperimentOptions o;
    o.schemes = all_schemes();
    for (std::uint64_t s = 1; s <= 20; ++s) o.seeds.push_back(s);
    const auto traces = run_all(ScenarioConfig{}, o);
    std::map<Scheme, RunSummary> mean;
    for (const auto& tr : traces) {
        const auto s = summarize(tr);
        auto& m = mean[tr.scheme];
        m.objective += s.objective / 20;
        m.latency += s.latency / 20;
        m.cost += s.cost / 20;
    }
    const auto& P = mean[Scheme::proposed];
    std::vector<std::string> failed;
    if (!(P.objective <= mean[Scheme::fuas].objective)) failed.push_back("PROPOSED<=FUAS");
    if (!(mean[Scheme::fuas].objective <= mean[Scheme::ruas].objective)) failed.push_back("FUAS<=RUAS");
    for (Scheme s : {Scheme::neec, Scheme::wo_cloud})
        if (!(mean[s].cost >= 1.5 * P.cost)) failed.push_back(scheme_name(s) + " cost>=1.5x");
    for (Scheme s : {Scheme::fixed30, Scheme::fixed80, Scheme::fixed100, Scheme::eb})
        if (!(P.latency <= mean[s].latency)) failed.push_back("e2e<=" + scheme_name(s));
    if (!(P.latency <= 0.9 * mean[Scheme::fixed30].latency)) failed.push_back("10% margin vs FIXED_30");

    std::string detail;
    for (auto& [s, m] : mean)
        detail += fmt::format("{} obj {:.4e} e2e {:.4e} cost {:.3f}; ", scheme_name(s), m.objective, m.latency, m.cost);
    detail += fmt::format("{:.0f}s", seconds_since(t0));
    if (!failed.empty()) {
        detail += "; failed:";
        for (const auto& f : failed) detail += " " + f;
    }
    return {failed.empty(), detail};
}

Verdict sweeps()
{
    const auto t0 = Clock::now();
    std::vector<std::string> failed;
    std::string detail;
    auto check = [&](const std::string& param, const std::vector<double>& grid, std::vector<Scheme> schemes) {
        ExperimentOptions o;
        o.schemes = schemes;
        o.seeds = {1, 2, 3, 4, 5};
        const auto table = sweep_table(ScenarioConfig{}, {param, grid}, o);
        std::map<std::pair<std::string, double>, double> e2e;  // (scheme, point) -> mean latency
        for (const auto& r : table.rows)
            if (r[4] == "latency") e2e[{r[2], std::stod(r[1])}] += std::stod(r[5]) / 5;
        for (Scheme s : schemes) {
            const auto name = scheme_name(s);
            detail += param + " " + name + ":";
            for (std::size_t i = 0; i < grid.size(); ++i) {
                const double v = e2e[{name, std::stod(num(grid[i]))}];
                detail += fmt::format(" {:.4e}", v);
                if (i && v > e2e[{name, std::stod(num(grid[i - 1]))}] * 1.01) failed.push_back(param + " " + name);
            }
            detail += "; ";
        }
    };
    check("f_k", {2.0, 2.5, 3.0, 3.5}, all_schemes());
    check("E_max", {3e-4, 3.5e-4, 5e-4, 1.0}, {Scheme::proposed});
    detail += fmt::format("{:.0f}s", seconds_since(t0));
    if (!failed.empty()) {
        detail += "; increased:";
        for (const auto& f : failed) detail += " " + f;
    }
    return {failed.empty(), detail};
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

Verdict determinism()
{
    const auto dir = std::filesystem::temp_directory_path() / "hecc_acceptance_determinism";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    const auto cfg = dir / "config.json";
    {
        auto c = ScenarioConfig{};
        c.frames = 3;
        std::ofstream(cfg) << dump_config(c);
    }
    bool ok = true;
    std::string detail;
    for (const std::string cmd : {"compare", "run"}) {
        std::string files[2];
        for (int i = 0; i < 2; ++i) {
            const auto out = dir / fmt::format("{}{}", cmd, i);
            const auto line = fmt::format("\"{}\" {} --config \"{}\" --seeds 1-2 --schemes PROPOSED,RUAS,EB --workers {} --out \"{}\"",
                                          HECC_SIM_PATH, cmd, cfg.string(), i + 1, out.string());
            if (std::system(line.c_str()) != 0) return {false, "command failed: " + line};
            for (const auto& e : std::filesystem::directory_iterator(out)) files[i] += e.path().filename().string() + slurp(e.path());
        }
        const bool same = !files[0].empty() && files[0] == files[1];
        ok = ok && same;
        detail += fmt::format("{}: {} bytes {}; ", cmd, files[0].size(), same ? "identical" : "DIFFER");
    }
    std::filesystem::remove_all(dir);
    return {ok, detail};
}

}  // namespace

// Optional arguments select criteria by number; default is all.
int main(int argc, char** argv)
{
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
        {"coupled and simplified forms agree", equivalence},
        {"cost truth table", cost_table},
        {"surrogate soundness", surrogates},
        {"long-term SCA convergence", longterm_convergence},
        {"oracle gap", oracle},
        {"short-term SCA convergence", shortterm_convergence},
        {"benchmark ordering", benchmark_ordering},
        {"monotone sweeps", sweeps},
        {"determinism", determinism},
    };
    int failed = 0;
    std::vector<bool> wanted(criteria.size(), argc == 1);
    for (int a = 1; a < argc; ++a) {
        const int n = std::atoi(argv[a]);
        if (n < 1 || n > static_cast<int>(criteria.size())) {
            std::fprintf(stderr, "no criterion %s\n", argv[a]);
            return 2;
        }
        wanted[n - 1] = true;
    }
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (!wanted[i]) continue;
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        failed += !v.pass;
        std::printf("[%zu] %s %s: %s\n", i + 1, v.pass ? "PASS" : "FAIL", criteria[i].first.c_str(), v.detail.c_str());
        std::fflush(stdout);
    }
    return failed ? 1 : 0;
}
