#pragma once

#include "budgetwise/campaign.hpp"

#include <json.hpp>

namespace budgetwise {

using Json = nlohmann::json;

Json to_json(Strategy x);
Json to_json(const GPHyperparams& h);
Json to_json(const CampaignConfig& config);
Json to_json(const IterationRecord& rec);
Json to_json(const CampaignTrajectory& tr);
Json to_json(const EngineState& state);
Json to_json(const ScoredPoint& p);

// Parsers throw InvalidArgument naming the offending field.
Strategy strategy_from_json(const Json& j);
GPHyperparams hyperparams_from_json(const Json& j);
// Missing keys take CampaignConfig defaults; the result is validated.
CampaignConfig config_from_json(const Json& j);
IterationRecord record_from_json(const Json& j);
EngineState engine_state_from_json(const Json& j);

} // namespace budgetwise
