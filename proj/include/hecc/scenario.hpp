#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

namespace hecc {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

double distance(Point a, Point b);

struct Prices {
    double install = 0.1;     // $/service
    double uninstall = 0.05;  // $/service
    double operate = 0.1;     // $/service per long-term frame
    double request = 0.01;    // $/request forwarded to the cloud
};

/// Full network parameterization. All quantities are SI; dBm inputs are
/// converted once when a config file is loaded.
struct ScenarioConfig {
    int num_ues = 8;
    int num_ess = 2;
    int num_services = 8;
    int antennas = 8;
    double area_side = 200.0;  // m

    std::vector<Point> es_positions;     // empty: placed by generate_topology
    std::vector<Point> ue_positions;     // empty: uniform draw
    std::vector<double> cloud_distance;  // per ES, empty: 10 km each

    double bandwidth = 10e6;               // Hz
    double noise_density = 3.981071705534973e-21;  // W/Hz (-174 dBm/Hz)
    double tx_power = 0.19952623149688797;  // W (23 dBm)

    double ue_rate = 1e9;         // cycles/s
    double es_rate = 2e9;         // cycles/s per UE served at an ES
    double cloud_rate = 4e9;      // cycles/s per UE served at the cloud
    double es_capacity = 20e9;    // cycles/s
    double cloud_capacity = 30e9; // cycles/s

    double fronthaul_rate = 5e9;  // bits/s, ES to ES
    double backhaul_rate = 1e9;   // bits/s, ES to cloud
    double propagation_speed = 2e8;  // m/s

    int max_services_per_es = 6;
    Prices prices;

    double cost_cap = 20.0;     // $
    double energy_cap = 1.0;    // J
    double latency_cap = 2e-3;  // s
    double rate_floor = 1e6;    // bits/s

    double weight_latency = 0.999;
    double weight_cost = 0.001;

    double capacitance = 1e-27;  // W s^3 / cycle^3

    double task_bytes = 1354.0;
    double complexity_min = 200.0;  // cycles/byte
    double complexity_max = 500.0;

    int frames = 10;
    int slots_per_frame = 5;
    int request_period = 5;  // frames between request redraws
    std::uint64_t seed = 1;
};

/// Throws std::invalid_argument naming the first offending field.
void validate(const ScenarioConfig& config);

// ---------------------------------------------------------------------------
// Random substreams

enum class Stream : std::uint64_t {
    topology = 1,
    channel = 2,
    task = 3,
    request = 4,
    association = 5,
    anchor = 6,
};

/// A generator keyed by (seed, stream, keys...). Two calls with the same key
/// tuple return identical sequences regardless of what else was drawn.
std::mt19937_64 make_stream(std::uint64_t seed, Stream stream, std::initializer_list<std::uint64_t> keys = {});

// ---------------------------------------------------------------------------
// Channel

struct ChannelEntry {
    double path_loss = 0.0;  // linear power gain
    std::vector<std::complex<double>> small_scale;
    double gain = 0.0;  // path_loss * |h|^2
};

class ChannelState {
public:
    ChannelState() = default;
    ChannelState(int num_ues, int num_ess);

    int num_ues() const { return num_ues_; }
    int num_ess() const { return num_ess_; }

    ChannelEntry& at(int m, int k) { return entries_[static_cast<std::size_t>(m * num_ess_ + k)]; }
    const ChannelEntry& at(int m, int k) const { return entries_[static_cast<std::size_t>(m * num_ess_ + k)]; }
    double gain(int m, int k) const { return at(m, k).gain; }

private:
    int num_ues_ = 0;
    int num_ess_ = 0;
    std::vector<ChannelEntry> entries_;
};

struct TaskSpec {
    double deadline = 0.0;  // s
    double size = 0.0;      // bits
    double cycles = 0.0;    // CPU cycles
    int service = 0;        // 0-based service id
};

struct RequestState {
    std::vector<int> service_of_ue;  // 0-based
    int regenerations = 0;
};

/// A generated network: config with positions filled in plus the derived
/// geometry. Immutable once built.
struct Scenario {
    ScenarioConfig config;
    std::vector<double> path_loss;    // M*K, linear
    std::vector<double> es_distance;  // K*K, m

    int num_ues() const { return config.num_ues; }
    int num_ess() const { return config.num_ess; }
    int num_services() const { return config.num_services; }
    double path_loss_at(int m, int k) const { return path_loss[static_cast<std::size_t>(m * config.num_ess + k)]; }
    double es_distance_at(int k, int kp) const { return es_distance[static_cast<std::size_t>(k * config.num_ess + kp)]; }
};

/// ES positions on the horizontal midline, x = side*k/(K+1); UEs uniform.
ScenarioConfig generate_topology(ScenarioConfig config, std::mt19937_64& rng);

/// -35.3 - 37.6 log10(d). Throws for d <= 0.
double path_loss_db(double distance_m);

ChannelEntry draw_channel(std::mt19937_64& rng, int antennas, double path_loss);

/// Validates, places nodes from the topology substream, and precomputes path loss.
Scenario make_scenario(const ScenarioConfig& config);

/// Redraws every UE's service on frames that are multiples of the request
/// period; other frames return the state unchanged.
RequestState advance_requests(const RequestState& state, int frame_index, int num_services, int period,
                              std::mt19937_64& rng);

/// Request state for a given frame, replayed from the request substream.
RequestState requests_for_frame(const Scenario& scenario, int frame_index);

/// Small-scale fading for (frame, slot); path loss is fixed for the run.
ChannelState draw_channel_state(const Scenario& scenario, int frame, int slot);

/// Task draws for (frame, slot): fixed size, cycles uniform in the complexity band.
std::vector<TaskSpec> draw_tasks(const Scenario& scenario, const RequestState& requests, int frame, int slot);

}  // namespace hecc
