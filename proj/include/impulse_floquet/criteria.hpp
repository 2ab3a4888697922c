#pragma once

#include <optional>
#include <string>
#include <vector>

#include "impulse_floquet/system.hpp"

namespace impulse_floquet {

enum class CriterionId {
    krein,
    guseinov_kaymakcalan,
    guseinov_zafer,
    guseinov_zafer_boundary,
    wang,
    main,
    main_boundary,
};

enum class ConditionStatus { satisfied, violated, marginal, undecidable };
enum class Conclusion { certified_stable, inconclusive, not_applicable };

std::string to_string(CriterionId id);
std::string to_string(ConditionStatus status);
std::string to_string(Conclusion conclusion);

/// One hypothesis of a stability criterion. `margin` is positive when the
/// hypothesis holds with room to spare: bound - value for inequalities,
/// the attained minimum for pointwise sign conditions, tolerance - |deviation|
/// for equalities.
struct Condition {
    std::string label;
    ConditionStatus status;
    double margin;
    bool strict = false;  // strict inequality; used when screening decisive margins
};

struct CriterionReport {
    CriterionId id;
    std::vector<Condition> conditions;
    Conclusion conclusion;
    std::string note;  // reason for not-applicable, empty otherwise

    bool certified() const { return conclusion == Conclusion::certified_stable; }
    /// Smallest margin over the strict inequality conditions (+inf if none).
    double min_strict_margin() const;
};

struct CriteriaTolerances {
    double strict = 1e-9;      // marginal band for strict inequalities, scaled by max(1, |bound|)
    double equality = 1e-9;    // equality band, scaled by the magnitude of the summed terms
    double nonzero = 1e-9;     // "not identically zero" threshold, scaled by 1 + max |inputs|
    double continuity = 1e-9;  // a/b one-sided limit matching, scaled by 1 + |a/b|
    double quadrature = 1e-10;
};

enum class ConditionCBranch { c1, c2, c3, none, undecidable };
std::string to_string(ConditionCBranch branch);

struct ConditionCStatus {
    ConditionCBranch branch = ConditionCBranch::none;
    std::optional<std::size_t> nonzero_beta_index;  // C1 witness
    double max_expression = 0.0;                    // max |(a/b)' - c + a^2/b| on the sample grid (C3)
    std::string reason;

    bool holds() const {
        return branch == ConditionCBranch::c1 || branch == ConditionCBranch::c2 || branch == ConditionCBranch::c3;
    }
};

/// Integrals, sums and pointwise extrema shared by all criteria. Computed once per system.
struct SystemQuantities {
    double int_a = 0.0;
    double int_abs_a = 0.0;
    double int_b = 0.0;
    double int_c = 0.0;
    double int_abs_c = 0.0;
    double int_c_pos = 0.0;
    std::optional<double> int_a2_over_b;  // empty when b is not bounded away from zero
    double ratio_sum = 0.0;               // sum beta/alpha
    double ratio_pos_sum = 0.0;           // sum (beta/alpha)^+
    double ratio_abs_sum = 0.0;
    double alpha_product_squared = 1.0;
    double min_b = 0.0;
    double min_c = 0.0;
    double min_bc_minus_a2 = 0.0;
    double max_abs_bc_minus_a2 = 0.0;
    double max_abs_input = 0.0;  // max |a|, |b|, |c| on the sample grid
    bool a_over_b_continuous = false;
    double max_a_over_b_jump = 0.0;
    bool impulse_free = true;  // every impulse is the identity jump
};

SystemQuantities compute_quantities(const ImpulsiveSystem& system, const CriteriaTolerances& tol = {});

ConditionCStatus condition_c_status(const ImpulsiveSystem& system, const CriteriaTolerances& tol = {});

CriterionReport check_krein(const ImpulsiveSystem& system, const CriteriaTolerances& tol = {});
CriterionReport check_guseinov_kaymakcalan(const ImpulsiveSystem& system, const CriteriaTolerances& tol = {});
CriterionReport check_guseinov_zafer(const ImpulsiveSystem& system, const CriteriaTolerances& tol = {});
CriterionReport check_guseinov_zafer_boundary(const ImpulsiveSystem& system, const CriteriaTolerances& tol = {});
CriterionReport check_wang(const ImpulsiveSystem& system, const CriteriaTolerances& tol = {});
CriterionReport check_main(const ImpulsiveSystem& system, const CriteriaTolerances& tol = {});
CriterionReport check_main_boundary(const ImpulsiveSystem& system, const CriteriaTolerances& tol = {});

/// Variants reusing precomputed quantities.
CriterionReport check_krein(const SystemQuantities& q, const CriteriaTolerances& tol);
CriterionReport check_guseinov_kaymakcalan(const SystemQuantities& q, const CriteriaTolerances& tol);
CriterionReport check_guseinov_zafer(const SystemQuantities& q, const CriteriaTolerances& tol);
CriterionReport check_guseinov_zafer_boundary(const SystemQuantities& q, const ConditionCStatus& cond,
                                              const CriteriaTolerances& tol);
CriterionReport check_wang(const SystemQuantities& q, const CriteriaTolerances& tol);
CriterionReport check_main(const SystemQuantities& q, const CriteriaTolerances& tol);
CriterionReport check_main_boundary(const SystemQuantities& q, const ConditionCStatus& cond,
                                    const CriteriaTolerances& tol);

struct CriteriaSummary {
    std::vector<CriterionReport> reports;  // krein, g-k, g-z, g-z boundary, wang, main, main boundary
    ConditionCStatus condition_c;
    bool any_certified = false;
};

CriteriaSummary evaluate_all(const ImpulsiveSystem& system, const CriteriaTolerances& tol = {});

}  // namespace impulse_floquet
