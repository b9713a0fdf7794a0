#include "hecc/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace hecc {

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

namespace {

void require(bool ok, const std::string& field, const std::string& what)
{
    if (!ok) throw std::invalid_argument("config." + field + ": " + what);
}

bool inside(Point p, double side) { return p.x >= 0.0 && p.x <= side && p.y >= 0.0 && p.y <= side; }

}  // namespace

void validate(const ScenarioConfig& c)
{
    require(c.num_ues >= 1, "num_ues", "must be >= 1");
    require(c.num_ess >= 1, "num_ess", "must be >= 1");
    require(c.num_services >= 1, "num_services", "must be >= 1");
    require(c.antennas >= 1, "antennas", "must be >= 1");
    require(c.area_side > 0, "area_side", "must be positive");
    require(c.max_services_per_es >= 1 && c.max_services_per_es <= c.num_services, "max_services_per_es",
            "must lie in [1, num_services]");

    const std::pair<const char*, double> positive[] = {
        {"bandwidth", c.bandwidth},
        {"noise_density", c.noise_density},
        {"tx_power", c.tx_power},
        {"ue_rate", c.ue_rate},
        {"es_rate", c.es_rate},
        {"cloud_rate", c.cloud_rate},
        {"es_capacity", c.es_capacity},
        {"cloud_capacity", c.cloud_capacity},
        {"fronthaul_rate", c.fronthaul_rate},
        {"backhaul_rate", c.backhaul_rate},
        {"propagation_speed", c.propagation_speed},
        {"prices.install", c.prices.install},
        {"prices.uninstall", c.prices.uninstall},
        {"prices.operate", c.prices.operate},
        {"prices.request", c.prices.request},
        {"cost_cap", c.cost_cap},
        {"energy_cap", c.energy_cap},
        {"latency_cap", c.latency_cap},
        {"rate_floor", c.rate_floor},
        {"capacitance", c.capacitance},
        {"task_bytes", c.task_bytes},
        {"complexity_min", c.complexity_min},
    };
    for (const auto& [name, value] : positive) require(value > 0 && std::isfinite(value), name, "must be positive");

    require(c.prices.uninstall <= c.prices.install, "prices.uninstall", "must not exceed prices.install");
    require(c.complexity_max >= c.complexity_min, "complexity_max", "must be >= complexity_min");
    require(c.weight_latency >= 0 && c.weight_cost >= 0, "weight_latency", "weights must be nonnegative");
    require(std::abs(c.weight_latency + c.weight_cost - 1.0) < 1e-9, "weight_cost", "weights must sum to 1");
    require(c.frames >= 1, "frames", "must be >= 1");
    require(c.slots_per_frame >= 1, "slots_per_frame", "must be >= 1");
    require(c.request_period >= 1, "request_period", "must be >= 1");

    if (!c.es_positions.empty()) {
        require(static_cast<int>(c.es_positions.size()) == c.num_ess, "es_positions", "needs one entry per ES");
        for (auto p : c.es_positions) require(inside(p, c.area_side), "es_positions", "outside the area");
    }
    if (!c.ue_positions.empty()) {
        require(static_cast<int>(c.ue_positions.size()) == c.num_ues, "ue_positions", "needs one entry per UE");
        for (auto p : c.ue_positions) require(inside(p, c.area_side), "ue_positions", "outside the area");
    }
    if (!c.cloud_distance.empty()) {
        require(static_cast<int>(c.cloud_distance.size()) == c.num_ess, "cloud_distance", "needs one entry per ES");
        for (double d : c.cloud_distance) require(d > 0, "cloud_distance", "must be positive");
    }
}

std::mt19937_64 make_stream(std::uint64_t seed, Stream stream, std::initializer_list<std::uint64_t> keys)
{
    std::vector<std::uint32_t> words;
    auto push = [&](std::uint64_t v) {
        words.push_back(static_cast<std::uint32_t>(v & 0xffffffffu));
        words.push_back(static_cast<std::uint32_t>(v >> 32));
    };
    push(seed);
    push(static_cast<std::uint64_t>(stream));
    for (auto k : keys) push(k);
    std::seed_seq seq(words.begin(), words.end());
    return std::mt19937_64(seq);
}

ChannelState::ChannelState(int num_ues, int num_ess)
    : num_ues_(num_ues), num_ess_(num_ess), entries_(static_cast<std::size_t>(num_ues * num_ess))
{
}

ScenarioConfig generate_topology(ScenarioConfig config, std::mt19937_64& rng)
{
    const int K = config.num_ess;
    if (config.es_positions.empty()) {
        // K=2 gives (66,100),(133,100) after truncation to whole meters
        for (int k = 1; k <= K; ++k) {
            double x = std::floor(config.area_side * k / (K + 1));
            config.es_positions.push_back({x, config.area_side / 2});
        }
    }
    if (config.ue_positions.empty()) {
        std::uniform_real_distribution<double> u(0.0, config.area_side);
        for (int m = 0; m < config.num_ues; ++m) {
            double x = u(rng);
            double y = u(rng);
            config.ue_positions.push_back({x, y});
        }
    }
    if (config.cloud_distance.empty()) config.cloud_distance.assign(static_cast<std::size_t>(K), 10e3);
    return config;
}

double path_loss_db(double distance_m)
{
    if (!(distance_m > 0)) throw std::invalid_argument("path_loss_db: distance must be positive");
    return -35.3 - 37.6 * std::log10(distance_m);
}

ChannelEntry draw_channel(std::mt19937_64& rng, int antennas, double path_loss)
{
    if (antennas < 1) throw std::invalid_argument("draw_channel: antennas must be >= 1");
    std::normal_distribution<double> n(0.0, std::sqrt(0.5));
    ChannelEntry e;
    e.path_loss = path_loss;
    e.small_scale.resize(static_cast<std::size_t>(antennas));
    double norm2 = 0.0;
    for (auto& h : e.small_scale) {
        double re = n(rng);
        double im = n(rng);
        h = {re, im};
        norm2 += re * re + im * im;
    }
    e.gain = path_loss * norm2;
    return e;
}

Scenario make_scenario(const ScenarioConfig& config)
{
    validate(config);
    auto rng = make_stream(config.seed, Stream::topology);
    Scenario s;
    s.config = generate_topology(config, rng);
    validate(s.config);

    const int M = s.config.num_ues, K = s.config.num_ess;
    s.path_loss.resize(static_cast<std::size_t>(M * K));
    for (int m = 0; m < M; ++m)
        for (int k = 0; k < K; ++k) {
            double d = std::max(distance(s.config.ue_positions[m], s.config.es_positions[k]), 1.0);
            s.path_loss[static_cast<std::size_t>(m * K + k)] = std::pow(10.0, path_loss_db(d) / 10.0);
        }
    s.es_distance.resize(static_cast<std::size_t>(K * K));
    for (int k = 0; k < K; ++k)
        for (int kp = 0; kp < K; ++kp)
            s.es_distance[static_cast<std::size_t>(k * K + kp)] =
                distance(s.config.es_positions[k], s.config.es_positions[kp]);
    return s;
}

RequestState advance_requests(const RequestState& state, int frame_index, int num_services, int period,
                              std::mt19937_64& rng)
{
    if (frame_index < 0) throw std::invalid_argument("advance_requests: negative frame");
    if (frame_index % period != 0 && !state.service_of_ue.empty()) return state;
    RequestState next = state;
    std::uniform_int_distribution<int> pick(0, num_services - 1);
    for (auto& s : next.service_of_ue) s = pick(rng);
    if (frame_index > 0) ++next.regenerations;
    return next;
}

RequestState requests_for_frame(const Scenario& scenario, int frame_index)
{
    const auto& c = scenario.config;
    RequestState state;
    state.service_of_ue.assign(static_cast<std::size_t>(c.num_ues), 0);
    int last = frame_index - frame_index % c.request_period;
    for (int f = 0; f <= last; f += c.request_period) {
        auto rng = make_stream(c.seed, Stream::request, {static_cast<std::uint64_t>(f)});
        state = advance_requests(state, f, c.num_services, c.request_period, rng);
    }
    return state;
}

ChannelState draw_channel_state(const Scenario& scenario, int frame, int slot)
{
    const auto& c = scenario.config;
    auto rng = make_stream(c.seed, Stream::channel, {static_cast<std::uint64_t>(frame), static_cast<std::uint64_t>(slot)});
    ChannelState state(c.num_ues, c.num_ess);
    for (int m = 0; m < c.num_ues; ++m)
        for (int k = 0; k < c.num_ess; ++k) state.at(m, k) = draw_channel(rng, c.antennas, scenario.path_loss_at(m, k));
    return state;
}

std::vector<TaskSpec> draw_tasks(const Scenario& scenario, const RequestState& requests, int frame, int slot)
{
    const auto& c = scenario.config;
    auto rng = make_stream(c.seed, Stream::task, {static_cast<std::uint64_t>(frame), static_cast<std::uint64_t>(slot)});
    std::uniform_real_distribution<double> complexity(c.complexity_min, c.complexity_max);
    std::vector<TaskSpec> tasks(static_cast<std::size_t>(c.num_ues));
    for (int m = 0; m < c.num_ues; ++m) {
        auto& t = tasks[m];
        t.deadline = c.latency_cap;
        t.size = c.task_bytes * 8.0;
        t.cycles = c.task_bytes * complexity(rng);
        t.service = requests.service_of_ue.at(m);
    }
    return tasks;
}

}  // namespace hecc
