#pragma once

#include <json.hpp>

#include "fblock/allocation.hpp"
#include "fblock/bounds.hpp"
#include "fblock/builtin_encoders.hpp"
#include "fblock/channel.hpp"
#include "fblock/mc_stats.hpp"

namespace fblock {

using Json = nlohmann::ordered_json;

/// {"noise": [...], "power": P}; L is the noise length.
Json to_json(const ChannelSpec& spec);
ChannelSpec channel_from_json(const Json& j);

/// {"lambda": ..., "pstar": [...], "mu": [...]}
Json to_json(const WaterfillResult& wf);

/// {"name", "block_length", "message_count", "codebook_seed"[, "allocation"]}
Json to_json(const EncoderConfig& config);
EncoderConfig encoder_config_from_json(const Json& j);

Json to_json(const MgfEstimate& est);
Json to_json(const ConverseReport& report);

}  // namespace fblock
