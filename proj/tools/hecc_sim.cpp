#include <cstdio>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hecc/config.hpp"
#include "hecc/experiments.hpp"

using namespace hecc;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// "1,2,5-8"
std::vector<std::uint64_t> parse_seeds(const std::string& text)
{
    std::vector<std::uint64_t> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find(',', start);
        if (end == std::string::npos) end = text.size();
        const auto item = text.substr(start, end - start);
        const auto dash = item.find('-', 1);
        try {
            std::size_t used = 0;
            if (dash == std::string::npos) {
                out.push_back(std::stoull(item, &used));
                if (used != item.size()) throw std::invalid_argument("");
            } else {
                const auto lo = std::stoull(item.substr(0, dash)), hi = std::stoull(item.substr(dash + 1));
                if (hi < lo) throw std::invalid_argument("");
                for (auto s = lo; s <= hi; ++s) out.push_back(s);
            }
        } catch (const std::exception&) {
            throw UsageError("bad seed list '" + text + "'");
        }
        start = end + 1;
    }
    return out;
}

std::vector<std::string> split(const std::string& text)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find(',', start);
        if (end == std::string::npos) end = text.size();
        if (end > start) out.push_back(text.substr(start, end - start));
        start = end + 1;
    }
    return out;
}

std::vector<double> parse_alphas(const std::string& text)
{
    std::vector<double> out;
    for (const auto& a : split(text)) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(a, &used));
            if (used != a.size() || !(out.back() >= 0)) throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw UsageError("bad alpha '" + a + "'");
        }
    }
    if (out.empty()) throw UsageError("empty alpha list");
    return out;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Two-timescale service placement and resource allocation simulator"};
    app.require_subcommand(1);

    std::string config_path, seeds = "1", alphas = "10,500,1000,10000,1000000", schemes, out = "out", sweep;
    int workers = 1;
    app.add_option("--config", config_path, "JSON config (defaults built in)")->envname("HECC_CONFIG");
    app.add_option("--seeds", seeds, "seed list, e.g. 1,2,5-8");
    app.add_option("--alpha", alphas, "penalty weights for convergence");
    app.add_option("--schemes", schemes, "comma-separated schemes (default: all)");
    app.add_option("--out", out, "output directory");
    app.add_option("--workers", workers, "parallel runs")->check(CLI::PositiveNumber);
    app.add_option("--sweep", sweep, "param:lo:hi:steps with param in f_k[GHz], E_max[J], T_max[ms], X_max[$]");

    auto* run_cmd = app.add_subcommand("run", "slot-level traces");
    auto* conv_cmd = app.add_subcommand("convergence", "iteration traces of both solvers");
    auto* cmp_cmd = app.add_subcommand("compare", "scheme comparison");
    auto* gap_cmd = app.add_subcommand("oracle-gap", "long-term solver against branch and bound");
    auto* sweep_cmd = app.add_subcommand("sweep", "parameter sweep");
    for (auto* sub : {run_cmd, conv_cmd, cmp_cmd, gap_cmd, sweep_cmd}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    ScenarioConfig config;
    ExperimentOptions o;
    try {
        if (!config_path.empty()) config = load_config(config_path);
        o.seeds = parse_seeds(seeds);
        o.workers = workers;
        o.schemes.clear();
        if (schemes.empty()) o.schemes = all_schemes();
        else
            for (const auto& s : split(schemes)) o.schemes.push_back(parse_scheme(s));
        if (cmp_cmd->parsed() && o.schemes.size() < 2) throw UsageError("compare needs at least two schemes");
        if (sweep_cmd->parsed() && sweep.empty()) throw UsageError("sweep needs --sweep param:lo:hi:steps");
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }

    try {
        std::filesystem::create_directories(out);
        const auto path = [&](const std::string& name) { return (std::filesystem::path(out) / name).string(); };
        if (run_cmd->parsed()) {
            run_table(run_all(config, o)).write(path("run.csv"));
        } else if (conv_cmd->parsed()) {
            auto c = config;
            c.seed = o.seeds.front();
            convergence_table(c, parse_alphas(alphas), {{8, 2}, {10, 2}, {10, 4}}).write(path("convergence.csv"));
        } else if (cmp_cmd->parsed()) {
            const auto traces = run_all(config, o);
            compare_table(traces).write(path("compare.csv"));
            run_table(traces).write(path("run.csv"));
        } else if (gap_cmd->parsed()) {
            for (auto seed : o.seeds) {
                auto c = config;
                c.seed = seed;
                const auto g = oracle_gap(c);
                g.gap.write(path("oracle_seed" + std::to_string(seed) + ".csv"));
                g.cost.write(path("oracle_cost_seed" + std::to_string(seed) + ".csv"));
            }
        } else {
            Sweep s;
            try {
                s = parse_sweep(sweep);
            } catch (const std::invalid_argument& e) {
                throw UsageError(e.what());
            }
            sweep_table(config, s, o).write(path("sweep.csv"));
        }
    } catch (const UsageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
