#pragma once

#include <nlohmann/json.hpp>

#include "nsplab/experiment.hpp"
#include "nsplab/measures.hpp"
#include "nsplab/nsp.hpp"
#include "nsplab/solver.hpp"
#include "nsplab/width.hpp"

namespace nsplab {

// JSON has no inf/nan; non-finite values are written as the strings
// "inf", "-inf", "nan".
nlohmann::json json_number(double v);

nlohmann::json to_json(const PropertyReport& r);
nlohmann::json to_json(const ComparisonReport& r);
nlohmann::json to_json(const NscReport& r);
nlohmann::json to_json(const NspResult& r);
nlohmann::json to_json(const ErcResult& r);
nlohmann::json to_json(const RobustnessProbe& r);
nlohmann::json to_json(const RegionMap& r);
nlohmann::json to_json(const SolveResult& r);
nlohmann::json to_json(const TrialRecord& r);
nlohmann::json to_json(const AdversarialPair& r);
nlohmann::json to_json(const RobustnessSweep& r);
nlohmann::json to_json(const WidthEstimate& r);
nlohmann::json to_json(const OmegaHatBound& r);
nlohmann::json to_json(const TradeoffPoint& r);
nlohmann::json to_json(const ProportionEstimate& r);
nlohmann::json to_json(const MonteCarloSummary& r);
nlohmann::json to_json(const Ce1Report& r);

}  // namespace nsplab
