#include "hecc/experiments.hpp"

#include <atomic>
#include <fstream>
#include <functional>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

#include <fmt/format.h>

#include "hecc/bnb_oracle.hpp"

namespace hecc {

namespace {

void parallel_for(int n, int workers, const std::function<void(int)>& body)
{
    workers = std::clamp(workers, 1, std::max(n, 1));
    if (workers == 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex guard;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int i = next++; i < n; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(guard);
                    if (!error) error = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

ScenarioConfig seeded(ScenarioConfig c, std::uint64_t seed)
{
    c.seed = seed;
    return c;
}

}  // namespace

std::string num(double v) { return fmt::format("{:.17g}", v); }

std::string Table::csv() const
{
    std::string out;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
    return out;
}

void Table::write(const std::string& path) const
{
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << csv();
    if (!f) throw std::runtime_error("cannot write " + path);
}

std::vector<RunTrace> run_all(const ScenarioConfig& config, const ExperimentOptions& o)
{
    const int S = static_cast<int>(o.schemes.size()), N = static_cast<int>(o.seeds.size());
    std::vector<Scenario> scenarios;
    for (auto seed : o.seeds) scenarios.push_back(make_scenario(seeded(config, seed)));
    std::vector<RunTrace> out(static_cast<std::size_t>(S * N));
    parallel_for(S * N, o.workers, [&](int i) {
        RunOptions r = o.run;
        r.scheme = o.schemes[i / N];
        out[i] = run(scenarios[i % N], r);
    });
    return out;
}

Table run_table(const std::vector<RunTrace>& traces)
{
    Table t{{"frame", "slot", "scheme", "seed", "objective", "latency_total", "cost_total", "trigger", "feasible"}, {}};
    for (const auto& tr : traces)
        for (const auto& s : tr.slots)
            t.rows.push_back({std::to_string(s.frame), std::to_string(s.slot), scheme_name(tr.scheme),
                              std::to_string(tr.seed), num(s.objective), num(s.latency_total), num(s.cost_total),
                              s.trigger ? "1" : "0", s.feasible ? "1" : "0"});
    return t;
}

RunSummary summarize(const RunTrace& tr)
{
    RunSummary s;
    const double n = static_cast<double>(tr.slots.size());
    for (const auto& r : tr.slots) {
        s.objective += r.objective / n;
        s.latency += r.latency_total / n;
        s.offload += r.offload_mean / n;
        s.energy += std::accumulate(r.energy.begin(), r.energy.end(), 0.0) / n;
        s.feasible_rate += (r.feasible ? 1.0 : 0.0) / n;
    }
    s.cost = tr.average_cost;
    s.triggers = tr.triggers;
    return s;
}

Table compare_table(const std::vector<RunTrace>& traces)
{
    Table t{{"scheme", "seed", "metric", "value"}, {}};
    for (const auto& tr : traces) {
        const auto s = summarize(tr);
        const auto name = scheme_name(tr.scheme), seed = std::to_string(tr.seed);
        for (auto [metric, v] : {std::pair{"objective", s.objective}, {"latency", s.latency}, {"cost", s.cost},
                                 {"offload", s.offload}, {"energy", s.energy}, {"feasible_rate", s.feasible_rate},
                                 {"triggers", static_cast<double>(s.triggers)}})
            t.rows.push_back({name, seed, metric, num(v)});
    }
    return t;
}

Table convergence_table(const ScenarioConfig& config, const std::vector<double>& alphas,
                        const std::vector<std::pair<int, int>>& sizes, const RunOptions& run)
{
    Table t{{"algorithm", "alpha", "M", "K", "iteration", "objective", "penalty"}, {}};
    for (auto [M, K] : sizes) {
        auto c = config;
        c.num_ues = M;
        c.num_ess = K;
        c.es_positions.clear();
        c.ue_positions.clear();
        c.cloud_distance.clear();
        const auto sc = make_scenario(c);
        const auto ch = draw_channel_state(sc, 0, 0);
        const auto tasks = draw_tasks(sc, requests_for_frame(sc, 0), 0, 0);
        const auto alloc = initial_allocation(sc, run);
        const auto cell = [&](auto... v) { return std::vector<std::string>{v...}; };
        LspResult best;
        for (double alpha : alphas) {
            auto o = run.lsp;
            o.alpha = alpha;
            auto l = solve_lsp({sc, ch, tasks, alloc, {}, {}}, o);
            for (const auto& r : l.trace)
                t.rows.push_back(cell("2", num(alpha), std::to_string(M), std::to_string(K),
                                      std::to_string(r.iteration), num(r.objective), num(r.penalty)));
            if (alpha == run.lsp.alpha || best.trace.empty()) best = std::move(l);
        }
        const double cost = total_cost(best.decision, {}, c.prices).total;
        auto s = solve_ssp({sc, ch, tasks}, best.decision, cost, {}, run.ssp);
        for (const auto& r : s.trace)
            t.rows.push_back(cell("3", "0", std::to_string(M), std::to_string(K), std::to_string(r.iteration),
                                  num(r.objective), "0"));
    }
    return t;
}

OracleGap oracle_gap(const ScenarioConfig& config, const RunOptions& run, long max_nodes)
{
    OracleGap out{{{"frame", "alg2_obj", "bnb_obj", "gap_pct"}, {}}, {{"frame", "alg2_cost", "bnb_cost"}, {}}};
    const auto sc = make_scenario(config);
    const auto alloc = initial_allocation(sc, run);
    std::vector<std::uint8_t> prev;
    for (int t = 0; t < config.frames; ++t) {
        const auto ch = draw_channel_state(sc, t, 0);
        const auto tasks = draw_tasks(sc, requests_for_frame(sc, t), t, 0);
        const LspProblem p{sc, ch, tasks, alloc, prev, {}};
        auto lo = run.lsp;
        lo.key = static_cast<std::uint64_t>(t);
        const auto l = solve_lsp(p, lo);
        OracleOptions oo;
        oo.max_nodes = max_nodes;
        oo.solver = run.lsp.solver;
        const auto b = solve_oracle(p, oo);
        if (!b.complete) throw std::runtime_error(fmt::format("oracle node cap of {} reached at frame {}", max_nodes, t));
        const double gap = 100.0 * (l.objective - b.objective) / b.objective;
        out.gap.rows.push_back({std::to_string(t), num(l.objective), num(b.objective), num(gap)});
        out.cost.rows.push_back({std::to_string(t), num(total_cost(l.decision, prev, config.prices).total),
                                 num(total_cost(b.decision, prev, config.prices).total)});
        prev = l.decision.placement;
    }
    return out;
}

namespace {

// display unit per swept parameter
double unit_of(const std::string& p)
{
    if (p == "f_k") return 1e9;    // GHz
    if (p == "E_max") return 1.0;  // J
    if (p == "T_max") return 1e-3; // ms
    if (p == "X_max") return 1.0;  // $
    throw std::invalid_argument("unknown sweep parameter '" + p + "' (f_k, E_max, T_max, X_max)");
}

}  // namespace

Sweep parse_sweep(const std::string& text)
{
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= text.size(); ++i)
        if (i == text.size() || text[i] == ':') {
            parts.push_back(text.substr(start, i - start));
            start = i + 1;
        }
    if (parts.size() != 4) throw std::invalid_argument("sweep must be param:lo:hi:steps");
    unit_of(parts[0]);
    double lo = 0, hi = 0;
    int steps = 0;
    try {
        std::size_t used = 0;
        lo = std::stod(parts[1], &used);
        if (used != parts[1].size()) throw std::invalid_argument("");
        hi = std::stod(parts[2], &used);
        if (used != parts[2].size()) throw std::invalid_argument("");
        steps = std::stoi(parts[3], &used);
        if (used != parts[3].size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
        throw std::invalid_argument("sweep bounds must be numbers: " + text);
    }
    if (steps < 1) throw std::invalid_argument("sweep needs at least one step");
    if (steps == 1 && lo != hi) throw std::invalid_argument("a one-point sweep needs lo == hi");
    Sweep s{parts[0], {}};
    for (int i = 0; i < steps; ++i) s.points.push_back(steps == 1 ? lo : lo + (hi - lo) * i / (steps - 1));
    return s;
}

ScenarioConfig with_parameter(ScenarioConfig c, const std::string& p, double value)
{
    const double v = value * unit_of(p);
    if (p == "f_k") c.es_rate = v;
    else if (p == "E_max") c.energy_cap = v;
    else if (p == "T_max") c.latency_cap = v;
    else c.cost_cap = v;
    validate(c);
    return c;
}

Table sweep_table(const ScenarioConfig& config, const Sweep& sweep, const ExperimentOptions& o)
{
    Table t{{"parameter", "point", "scheme", "seed", "metric", "value"}, {}};
    for (double point : sweep.points) {
        const auto traces = run_all(with_parameter(config, sweep.parameter, point), o);
        for (const auto& tr : traces) {
            const auto s = summarize(tr);
            for (auto [metric, v] : {std::pair{"objective", s.objective}, {"latency", s.latency}, {"cost", s.cost},
                                     {"feasible_rate", s.feasible_rate}})
                t.rows.push_back({sweep.parameter, num(point), scheme_name(tr.scheme), std::to_string(tr.seed), metric,
                                  num(v)});
        }
    }
    return t;
}

}  // namespace hecc
