#include "hecc/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "hecc/units.hpp"

namespace hecc {

using nlohmann::json;

namespace {

struct Reader {
    const json& node;
    std::string section;

    template <class T>
    void get(const char* key, T& out) const
    {
        auto it = node.find(key);
        if (it == node.end()) return;
        try {
            out = it->template get<T>();
        } catch (const json::exception&) {
            throw std::invalid_argument("config." + section + key + ": wrong type");
        }
    }

    void check_keys(std::initializer_list<const char*> allowed) const
    {
        for (auto it = node.begin(); it != node.end(); ++it) {
            bool ok = false;
            for (auto* a : allowed) ok = ok || it.key() == a;
            if (!ok) throw std::invalid_argument("config: unknown key '" + section + it.key() + "'");
        }
    }
};

std::vector<Point> points(const json& arr, const std::string& name)
{
    std::vector<Point> out;
    for (const auto& p : arr) {
        if (!p.is_array() || p.size() != 2) throw std::invalid_argument("config." + name + ": expected [x, y] pairs");
        out.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    return out;
}

const json& section(const json& root, const char* name)
{
    static const json empty = json::object();
    auto it = root.find(name);
    if (it == root.end()) return empty;
    if (!it->is_object()) throw std::invalid_argument(std::string("config.") + name + ": expected an object");
    return *it;
}

}  // namespace

ScenarioConfig parse_config(const std::string& text)
{
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    if (!root.is_object()) throw std::invalid_argument("config: top level must be an object");

    ScenarioConfig c;
    Reader{root, ""}.check_keys(
        {"network", "radio", "compute", "links", "prices", "limits", "weights", "tasks", "simulation"});

    const json& net = section(root, "network");
    Reader r{net, "network."};
    r.check_keys({"num_ues", "num_ess", "num_services", "antennas", "area_side", "es_positions", "ue_positions",
                  "cloud_distance", "max_services_per_es"});
    r.get("num_ues", c.num_ues);
    r.get("num_ess", c.num_ess);
    r.get("num_services", c.num_services);
    r.get("antennas", c.antennas);
    r.get("area_side", c.area_side);
    r.get("max_services_per_es", c.max_services_per_es);
    if (net.contains("es_positions")) c.es_positions = points(net["es_positions"], "network.es_positions");
    if (net.contains("ue_positions")) c.ue_positions = points(net["ue_positions"], "network.ue_positions");
    if (net.contains("cloud_distance")) {
        const auto& d = net["cloud_distance"];
        if (d.is_number())
            c.cloud_distance.assign(static_cast<std::size_t>(c.num_ess), d.get<double>());
        else
            r.get("cloud_distance", c.cloud_distance);
    }

    const json& radio = section(root, "radio");
    Reader rr{radio, "radio."};
    rr.check_keys({"bandwidth", "noise_density", "noise_density_dbm_per_hz", "tx_power", "tx_power_dbm"});
    rr.get("bandwidth", c.bandwidth);
    rr.get("noise_density", c.noise_density);
    rr.get("tx_power", c.tx_power);
    if (radio.contains("noise_density_dbm_per_hz"))
        c.noise_density = units::dbm_to_watt(radio["noise_density_dbm_per_hz"].get<double>());
    if (radio.contains("tx_power_dbm")) c.tx_power = units::dbm_to_watt(radio["tx_power_dbm"].get<double>());

    Reader rc{section(root, "compute"), "compute."};
    rc.check_keys({"ue_rate", "es_rate", "cloud_rate", "es_capacity", "cloud_capacity", "capacitance"});
    rc.get("ue_rate", c.ue_rate);
    rc.get("es_rate", c.es_rate);
    rc.get("cloud_rate", c.cloud_rate);
    rc.get("es_capacity", c.es_capacity);
    rc.get("cloud_capacity", c.cloud_capacity);
    rc.get("capacitance", c.capacitance);

    Reader rl{section(root, "links"), "links."};
    rl.check_keys({"fronthaul_rate", "backhaul_rate", "propagation_speed"});
    rl.get("fronthaul_rate", c.fronthaul_rate);
    rl.get("backhaul_rate", c.backhaul_rate);
    rl.get("propagation_speed", c.propagation_speed);

    Reader rp{section(root, "prices"), "prices."};
    rp.check_keys({"install", "uninstall", "operate", "request"});
    rp.get("install", c.prices.install);
    rp.get("uninstall", c.prices.uninstall);
    rp.get("operate", c.prices.operate);
    rp.get("request", c.prices.request);

    Reader rlim{section(root, "limits"), "limits."};
    rlim.check_keys({"cost_cap", "energy_cap", "latency_cap", "rate_floor"});
    rlim.get("cost_cap", c.cost_cap);
    rlim.get("energy_cap", c.energy_cap);
    rlim.get("latency_cap", c.latency_cap);
    rlim.get("rate_floor", c.rate_floor);

    const json& w = section(root, "weights");
    Reader rw{w, "weights."};
    rw.check_keys({"latency", "cost"});
    rw.get("latency", c.weight_latency);
    rw.get("cost", c.weight_cost);
    // one weight alone fixes the other
    if (w.contains("latency") && !w.contains("cost")) c.weight_cost = 1.0 - c.weight_latency;
    if (w.contains("cost") && !w.contains("latency")) c.weight_latency = 1.0 - c.weight_cost;

    Reader rt{section(root, "tasks"), "tasks."};
    rt.check_keys({"size_bytes", "complexity_min", "complexity_max"});
    rt.get("size_bytes", c.task_bytes);
    rt.get("complexity_min", c.complexity_min);
    rt.get("complexity_max", c.complexity_max);

    Reader rs{section(root, "simulation"), "simulation."};
    rs.check_keys({"frames", "slots_per_frame", "request_period", "seed"});
    rs.get("frames", c.frames);
    rs.get("slots_per_frame", c.slots_per_frame);
    rs.get("request_period", c.request_period);
    rs.get("seed", c.seed);

    validate(c);
    return c;
}

ScenarioConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string dump_config(const ScenarioConfig& c)
{
    auto pts = [](const std::vector<Point>& v) {
        json a = json::array();
        for (auto p : v) a.push_back({p.x, p.y});
        return a;
    };
    json j;
    j["network"] = {{"num_ues", c.num_ues},
                    {"num_ess", c.num_ess},
                    {"num_services", c.num_services},
                    {"antennas", c.antennas},
                    {"area_side", c.area_side},
                    {"max_services_per_es", c.max_services_per_es},
                    {"es_positions", pts(c.es_positions)},
                    {"ue_positions", pts(c.ue_positions)},
                    {"cloud_distance", c.cloud_distance}};
    j["radio"] = {{"bandwidth", c.bandwidth}, {"noise_density", c.noise_density}, {"tx_power", c.tx_power}};
    j["compute"] = {{"ue_rate", c.ue_rate},           {"es_rate", c.es_rate},
                    {"cloud_rate", c.cloud_rate},     {"es_capacity", c.es_capacity},
                    {"cloud_capacity", c.cloud_capacity}, {"capacitance", c.capacitance}};
    j["links"] = {{"fronthaul_rate", c.fronthaul_rate},
                  {"backhaul_rate", c.backhaul_rate},
                  {"propagation_speed", c.propagation_speed}};
    j["prices"] = {{"install", c.prices.install},
                   {"uninstall", c.prices.uninstall},
                   {"operate", c.prices.operate},
                   {"request", c.prices.request}};
    j["limits"] = {{"cost_cap", c.cost_cap},
                   {"energy_cap", c.energy_cap},
                   {"latency_cap", c.latency_cap},
                   {"rate_floor", c.rate_floor}};
    j["weights"] = {{"latency", c.weight_latency}, {"cost", c.weight_cost}};
    j["tasks"] = {{"size_bytes", c.task_bytes},
                  {"complexity_min", c.complexity_min},
                  {"complexity_max", c.complexity_max}};
    j["simulation"] = {{"frames", c.frames},
                       {"slots_per_frame", c.slots_per_frame},
                       {"request_period", c.request_period},
                       {"seed", c.seed}};
    return j.dump(2);
}

}  // namespace hecc
