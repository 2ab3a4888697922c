#include "impulse_floquet/report.hpp"

#include <cmath>

namespace impulse_floquet {

using nlohmann::json;

namespace {

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json matrix(const Mat2& m) { return json::array({json::array({m.xx, m.xu}), json::array({m.ux, m.uu})}); }

}  // namespace

json to_json(const Multipliers& m) {
    json out = json::array();
    for (const auto& rho : m) out.push_back({{"re", number(rho.real())}, {"im", number(rho.imag())}});
    return out;
}

json to_json(const MonodromyResult& m) {
    return {{"matrix", matrix(m.monodromy.matrix)},
            {"A", number(m.trace_a)},
            {"B", number(m.b)},
            {"det", number(m.det)},
            {"multipliers", to_json(m.multipliers)},
            {"error_estimate", number(m.error_estimate)}};
}

json to_json(const StabilityVerdict& v) {
    json diagnostics = {{"u1", number(v.u1)},
                        {"x2", number(v.x2)},
                        {"margin_a", number(v.margin_a)},
                        {"margin_b", number(v.margin_b)},
                        {"in_boundary_band", v.in_boundary_band},
                        {"bounded_solution", nullptr}};
    if (v.bounded_solution) diagnostics["bounded_solution"] = json::array({v.bounded_solution->x, v.bounded_solution->u});
    return {{"category", to_string(v.category)},
            {"A", number(v.trace_a)},
            {"B", number(v.b)},
            {"multipliers", to_json(v.multipliers)},
            {"diagnostics", diagnostics}};
}

json to_json(const CriterionReport& r) {
    json conditions = json::array();
    for (const auto& c : r.conditions)
        conditions.push_back({{"label", c.label}, {"status", to_string(c.status)}, {"margin", number(c.margin)}});
    json out = {{"criterion", to_string(r.id)}, {"conditions", conditions}, {"conclusion", to_string(r.conclusion)}};
    if (!r.note.empty()) out["note"] = r.note;
    return out;
}

json to_json(const ConditionCStatus& c) {
    return {{"branch", to_string(c.branch)},
            {"nonzero_beta_index", c.nonzero_beta_index ? json(*c.nonzero_beta_index) : json(nullptr)},
            {"max_expression", number(c.max_expression)},
            {"reason", c.reason}};
}

json to_json(const CriteriaSummary& s) {
    json reports = json::array();
    for (const auto& r : s.reports) reports.push_back(to_json(r));
    return {{"criteria", reports}, {"condition_c", to_json(s.condition_c)}, {"any_certified", s.any_certified}};
}

json to_json(const ZeroPair& p) {
    return {{"t1", p.t1}, {"t2", p.t2}, {"t1_at_impulse", p.t1_at_impulse}, {"t2_at_impulse", p.t2_at_impulse}};
}

json to_json(const LyapunovWitness& w) {
    return {{"t0", w.t0}, {"lhs", number(w.lhs)}, {"sup_t0", w.sup_t0}, {"sup_lhs", number(w.sup_lhs)},
            {"holds", w.holds}};
}

json to_json(const DisconjugacyResult& r) {
    return {{"verdict", to_string(r.verdict)}, {"sup", number(r.sup)}, {"t0_at_sup", r.t0_at_sup}};
}

json to_json(const OracleResult& r) {
    json out = {{"verdict", to_string(r.verdict)}, {"theta", nullptr}, {"zeros", nullptr}};
    if (r.theta) out["theta"] = number(*r.theta);
    if (r.zeros) out["zeros"] = json::array({r.zeros->first, r.zeros->second});
    return out;
}

json analysis_report(const MonodromyResult& m, const StabilityVerdict& v, const CriteriaSummary& s) {
    return {{"monodromy", to_json(m)}, {"verdict", to_json(v)}, {"criteria", to_json(s)}};
}

}  // namespace impulse_floquet
