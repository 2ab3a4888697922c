#pragma once

#include <nlohmann/json.hpp>

#include "impulse_floquet/criteria.hpp"
#include "impulse_floquet/floquet.hpp"
#include "impulse_floquet/lyapunov.hpp"

namespace impulse_floquet {

/// JSON views of the analysis results. Non-finite numbers serialize as null.
nlohmann::json to_json(const Multipliers& m);
nlohmann::json to_json(const MonodromyResult& m);
nlohmann::json to_json(const StabilityVerdict& v);
nlohmann::json to_json(const CriterionReport& r);
nlohmann::json to_json(const ConditionCStatus& c);
nlohmann::json to_json(const CriteriaSummary& s);
nlohmann::json to_json(const ZeroPair& p);
nlohmann::json to_json(const LyapunovWitness& w);
nlohmann::json to_json(const DisconjugacyResult& r);
nlohmann::json to_json(const OracleResult& r);

/// Monodromy, verdict and criteria of one system.
nlohmann::json analysis_report(const MonodromyResult& m, const StabilityVerdict& v, const CriteriaSummary& s);

}  // namespace impulse_floquet
