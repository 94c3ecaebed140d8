#pragma once

// JSON views of parameters, phase reports, SSA results and analysis reports.
// Field names follow the shipped schemas in schemas/.

#include <nlohmann/json.hpp>

#include "mendel/analysis.hpp"
#include "mendel/phases.hpp"
#include "mendel/ssa.hpp"

namespace mendel {

nlohmann::json to_json(const ModelParams& p);
/// {"aa": ..., ..., "BB": ...}
nlohmann::json state_json(const State& n);
nlohmann::json counts_json(const Counts& N);
nlohmann::json to_json(const PhaseSettings& s);
nlohmann::json to_json(const PhaseReport& r);
nlohmann::json to_json(const IntegrationStats& s);
nlohmann::json to_json(const FixedPointSet& fp);
nlohmann::json to_json(const SpectrumReport& s);
nlohmann::json to_json(const ScalingFit& f);
nlohmann::json to_json(const FlowVerdict& v);
nlohmann::json to_json(const CenterManifoldReduction& cm);
/// Summary without samples or the event log.
nlohmann::json summary_json(const SimulationResult& r);

}  // namespace mendel
