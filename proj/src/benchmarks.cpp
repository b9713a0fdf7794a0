#include "hecc/benchmarks.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <stdexcept>

namespace hecc {

namespace {

constexpr std::array kNames{std::pair{Scheme::proposed, "PROPOSED"}, std::pair{Scheme::fuas, "FUAS"},
                            std::pair{Scheme::ruas, "RUAS"},         std::pair{Scheme::neec, "NEEC"},
                            std::pair{Scheme::wo_cloud, "WO_CLOUD"}, std::pair{Scheme::eb, "EB"},
                            std::pair{Scheme::fixed30, "FIXED_30"},  std::pair{Scheme::fixed80, "FIXED_80"},
                            std::pair{Scheme::fixed100, "FIXED_100"}};

}  // namespace

std::string scheme_name(Scheme s)
{
    for (auto [id, name] : kNames)
        if (id == s) return name;
    throw std::invalid_argument("scheme_name: unknown scheme");
}

Scheme parse_scheme(std::string_view name)
{
    std::string up(name);
    std::transform(up.begin(), up.end(), up.begin(), [](unsigned char ch) { return std::toupper(ch); });
    if (up == "W/O_CLOUD" || up == "WOCLOUD") up = "WO_CLOUD";
    for (auto [id, n] : kNames)
        if (up == n) return id;
    throw std::invalid_argument("unknown scheme '" + std::string(name) + "'");
}

std::vector<Scheme> all_schemes()
{
    std::vector<Scheme> out;
    for (auto [id, name] : kNames) out.push_back(id);
    return out;
}

std::optional<double> fixed_offload(Scheme s)
{
    switch (s) {
    case Scheme::fixed30: return 0.3;
    case Scheme::fixed80: return 0.8;
    case Scheme::fixed100: return 1.0;
    default: return std::nullopt;
    }
}

std::vector<int> strongest_association(const ChannelState& channel)
{
    std::vector<int> out(static_cast<std::size_t>(channel.num_ues()), 0);
    for (int m = 0; m < channel.num_ues(); ++m)
        for (int k = 1; k < channel.num_ess(); ++k)
            if (channel.gain(m, k) > channel.gain(m, out[m])) out[m] = k;
    return out;
}

SchemeSetup apply_scheme(Scheme s, const Scenario& scenario, const ChannelState& channel, int frame)
{
    SchemeSetup out;
    const int M = scenario.num_ues(), K = scenario.num_ess();
    switch (s) {
    case Scheme::proposed: break;
    case Scheme::fuas: out.placement.assoc = strongest_association(channel); break;
    case Scheme::ruas: {
        auto rng = make_stream(scenario.config.seed, Stream::association, {static_cast<std::uint64_t>(frame)});
        std::uniform_int_distribution<int> pick(0, K - 1);
        out.placement.assoc.resize(static_cast<std::size_t>(M));
        for (auto& a : out.placement.assoc) a = pick(rng);
        break;
    }
    case Scheme::neec: out.placement.no_edge_edge = true; break;
    case Scheme::wo_cloud: out.placement.no_edge_cloud = true; break;
    case Scheme::eb: out.allocation.bandwidth = 1.0 / M; break;
    case Scheme::fixed30:
    case Scheme::fixed80:
    case Scheme::fixed100:
        out.allocation.phi = 1.0 - *fixed_offload(s);
        out.placement.require_association = true;
        break;
    }
    return out;
}

AllocationDecision pin_allocation(AllocationDecision alloc, const AllocationPins& pins)
{
    if (pins.phi) std::fill(alloc.phi.begin(), alloc.phi.end(), *pins.phi);
    if (pins.bandwidth) std::fill(alloc.b.begin(), alloc.b.end(), *pins.bandwidth);
    return alloc;
}

}  // namespace hecc
