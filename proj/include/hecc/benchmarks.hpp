#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hecc/longterm_sca.hpp"
#include "hecc/shortterm_sca.hpp"

namespace hecc {

enum class Scheme { proposed, fuas, ruas, neec, wo_cloud, eb, fixed30, fixed80, fixed100 };

/// PROPOSED, FUAS, RUAS, NEEC, WO_CLOUD, EB, FIXED_30, FIXED_80, FIXED_100.
std::string scheme_name(Scheme s);
/// Case-insensitive; throws std::invalid_argument for unknown names.
Scheme parse_scheme(std::string_view name);
std::vector<Scheme> all_schemes();

/// Offload fraction of a fixed-offloading scheme, empty otherwise.
std::optional<double> fixed_offload(Scheme s);

struct SchemeSetup {
    PlacementPins placement;
    AllocationPins allocation;
};

/// Pins of a scheme for one frame. FUAS uses the given channel; RUAS draws
/// from the association substream keyed by frame.
SchemeSetup apply_scheme(Scheme s, const Scenario& scenario, const ChannelState& channel, int frame);

/// Association of every UE to its strongest ES.
std::vector<int> strongest_association(const ChannelState& channel);

/// Overwrites pinned entries for every UE.
AllocationDecision pin_allocation(AllocationDecision alloc, const AllocationPins& pins);

}  // namespace hecc
