#include "impulse_floquet/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "impulse_floquet/quadrature.hpp"

namespace impulse_floquet {

std::string to_string(CriterionId id) {
    switch (id) {
        case CriterionId::krein: return "krein";
        case CriterionId::guseinov_kaymakcalan: return "guseinov-kaymakcalan";
        case CriterionId::guseinov_zafer: return "guseinov-zafer";
        case CriterionId::guseinov_zafer_boundary: return "guseinov-zafer-boundary";
        case CriterionId::wang: return "wang";
        case CriterionId::main: return "main";
        case CriterionId::main_boundary: return "main-boundary";
    }
    return "unknown";
}

std::string to_string(ConditionStatus status) {
    switch (status) {
        case ConditionStatus::satisfied: return "satisfied";
        case ConditionStatus::violated: return "violated";
        case ConditionStatus::marginal: return "marginal";
        case ConditionStatus::undecidable: return "undecidable";
    }
    return "unknown";
}

std::string to_string(Conclusion conclusion) {
    switch (conclusion) {
        case Conclusion::certified_stable: return "certified-stable";
        case Conclusion::inconclusive: return "inconclusive";
        case Conclusion::not_applicable: return "not-applicable";
    }
    return "unknown";
}

std::string to_string(ConditionCBranch branch) {
    switch (branch) {
        case ConditionCBranch::c1: return "C1";
        case ConditionCBranch::c2: return "C2";
        case ConditionCBranch::c3: return "C3";
        case ConditionCBranch::none: return "none";
        case ConditionCBranch::undecidable: return "undecidable";
    }
    return "unknown";
}

double CriterionReport::min_strict_margin() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& c : conditions)
        if (c.strict) m = std::min(m, c.margin);
    return m;
}

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

using Fn = std::function<double(double)>;

/// Sample points used for "for all t" and "not identically zero" tests:
/// Gauss nodes of equal cells plus both endpoints.
std::vector<double> sample_grid(double lo, double hi, int cells = 16) {
    const auto& rule = quadrature::gauss_legendre_rule(8);
    std::vector<double> ts{lo};
    const double h = (hi - lo) / cells;
    for (int k = 0; k < cells; ++k)
        for (auto it = rule.nodes.rbegin(); it != rule.nodes.rend(); ++it)
            ts.push_back(lo + k * h + 0.5 * h * (*it + 1.0));
    ts.push_back(hi);
    return ts;
}

/// Minimum of f on [lo, hi]. Polynomials are minimized exactly over the
/// endpoints and the roots of the derivative; other functions over a
/// Chebyshev sample followed by golden-section refinement.
double minimum_on(const Fn& f, const Polynomial* poly, double lo, double hi) {
    double m = std::min(f(lo), f(hi));
    if (!(hi > lo)) return m;
    if (poly) {
        const int deg = poly->degree();
        if (deg >= 2) {
            const Polynomial dp = poly->derivative();
            for (double r : quadrature::sign_changes([&dp](double t) { return dp(t); }, lo, hi,
                                                     1e-15 * std::max(1.0, std::abs(hi)), std::max(4, 2 * deg)))
                m = std::min(m, f(r));
        }
        return m;
    }
    const int n = 256;
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    std::vector<double> ts(n + 1);
    for (int k = 0; k <= n; ++k) ts[k] = mid - half * std::cos(std::numbers::pi * k / n);
    std::size_t best = 0;
    double best_v = f(ts[0]);
    for (std::size_t k = 1; k < ts.size(); ++k) {
        const double v = f(ts[k]);
        if (v < best_v) {
            best_v = v;
            best = k;
        }
    }
    m = std::min(m, best_v);
    const double a = ts[best == 0 ? 0 : best - 1];
    const double b = ts[std::min(best + 1, ts.size() - 1)];
    const double t = quadrature::golden_maximize([&f](double s) { return -f(s); }, a, b, 1e-12 * (hi - lo));
    return std::min(m, f(t));
}

struct PieceFns {
    Fn a, b, c;
    const Polynomial* pa;
    const Polynomial* pb;
    const Polynomial* pc;
};

PieceFns piece_fns(const Piece& p) {
    const Segment* sa = p.a;
    const Segment* sb = p.b;
    const Segment* sc = p.c;
    return {[sa](double t) { return eval_checked(*sa, t); }, [sb](double t) { return eval_checked(*sb, t); },
            [sc](double t) { return eval_checked(*sc, t); }, sa->polynomial(), sb->polynomial(), sc->polynomial()};
}

ConditionStatus strict_status(double margin, double band) {
    if (std::isnan(margin)) return ConditionStatus::undecidable;
    if (margin > band) return ConditionStatus::satisfied;
    if (margin < -band) return ConditionStatus::violated;
    return ConditionStatus::marginal;
}

/// value < bound
Condition strict_less(std::string label, double value, double bound, const CriteriaTolerances& tol) {
    const double margin = bound - value;
    return {std::move(label), strict_status(margin, tol.strict * std::max(1.0, std::abs(bound))), margin, true};
}

/// value > bound
Condition strict_greater(std::string label, double value, double bound, const CriteriaTolerances& tol) {
    const double margin = value - bound;
    return {std::move(label), strict_status(margin, tol.strict * std::max(1.0, std::abs(bound))), margin, true};
}

/// min f >= 0 with a rounding allowance.
Condition nonnegative(std::string label, double min_value, double scale, const CriteriaTolerances& tol) {
    const auto status = std::isnan(min_value)                           ? ConditionStatus::undecidable
                        : min_value >= -tol.strict * (1.0 + scale)       ? ConditionStatus::satisfied
                                                                         : ConditionStatus::violated;
    return {std::move(label), status, min_value, false};
}

/// min f > 0: attaining zero is a violation, positive values inside the band are marginal.
Condition positive(std::string label, double min_value, const CriteriaTolerances& tol) {
    ConditionStatus status;
    if (std::isnan(min_value)) status = ConditionStatus::undecidable;
    else if (min_value <= 0.0) status = ConditionStatus::violated;
    else if (min_value <= tol.strict) status = ConditionStatus::marginal;
    else status = ConditionStatus::satisfied;
    return {std::move(label), status, min_value, true};
}

Condition equality(std::string label, double deviation, double band) {
    if (std::isnan(deviation)) return {std::move(label), ConditionStatus::undecidable, nan, false};
    const double margin = band - std::abs(deviation);
    return {std::move(label), margin >= 0.0 ? ConditionStatus::satisfied : ConditionStatus::violated, margin, false};
}

Conclusion conclude(const std::vector<Condition>& conditions) {
    for (const auto& c : conditions)
        if (c.status != ConditionStatus::satisfied) return Conclusion::inconclusive;
    return Conclusion::certified_stable;
}

CriterionReport not_applicable(CriterionId id, std::string note) {
    return {id, {}, Conclusion::not_applicable, std::move(note)};
}

const char* const kProductLabel = "prod alpha_i^2 = 1";
const char* const kPositiveB = "b(t) > 0";
const char* const kIntegralPositive = "int (c - a^2/b) + sum beta_i/alpha_i > 0";
const char* const kIntegralZero = "int (c - a^2/b) + sum beta_i/alpha_i = 0";
const char* const kContinuity = "a/b continuous on [0, T]";

Condition product_condition(const SystemQuantities& q, const CriteriaTolerances& tol) {
    return equality(kProductLabel, q.alpha_product_squared - 1.0, tol.equality);
}

double impulsive_integral(const SystemQuantities& q) {
    return q.int_a2_over_b ? q.int_c - *q.int_a2_over_b + q.ratio_sum : nan;
}

Condition integral_positive(const SystemQuantities& q, const CriteriaTolerances& tol) {
    return strict_greater(kIntegralPositive, impulsive_integral(q), 0.0, tol);
}

Condition integral_zero(const SystemQuantities& q, const CriteriaTolerances& tol) {
    const double scale = q.int_abs_c + q.int_a2_over_b.value_or(0.0) + q.ratio_abs_sum;
    return equality(kIntegralZero, impulsive_integral(q), tol.equality * std::max(1.0, scale));
}

Condition gz_sum_condition(const SystemQuantities& q, const CriteriaTolerances& tol) {
    const double second = q.int_c_pos + q.ratio_pos_sum;
    const double value = q.int_b >= 0.0 ? q.int_abs_a + std::sqrt(q.int_b) * std::sqrt(second) : nan;
    return strict_less("int |a| + [int b]^1/2 [int c+ + sum (beta_i/alpha_i)+]^1/2 < 2", value, 2.0, tol);
}

Condition main_product_condition(const SystemQuantities& q, const CriteriaTolerances& tol) {
    const double value = std::exp(2.0 * q.int_abs_a) * q.int_b * (q.int_c_pos + q.ratio_pos_sum);
    return strict_less("exp(2 int |a|) [int b] [int c+ + sum (beta_i/alpha_i)+] < 4", value, 4.0, tol);
}

Condition continuity_condition(const SystemQuantities& q, const CriteriaTolerances& tol) {
    if (!(q.min_b > tol.strict)) return {kContinuity, ConditionStatus::undecidable, nan, false};
    return {kContinuity, q.a_over_b_continuous ? ConditionStatus::satisfied : ConditionStatus::violated,
            tol.continuity - q.max_a_over_b_jump, false};
}

Condition condition_c(const ConditionCStatus& c) {
    ConditionStatus status = ConditionStatus::violated;
    if (c.holds()) status = ConditionStatus::satisfied;
    else if (c.branch == ConditionCBranch::undecidable) status = ConditionStatus::undecidable;
    return {"condition (C): " + to_string(c.branch), status, c.max_expression, false};
}

Condition krein_sum_condition(const SystemQuantities& q, const CriteriaTolerances& tol) {
    const double prod = q.int_b * q.int_c;
    const double value = prod >= 0.0 ? q.int_abs_a + std::sqrt(prod) : nan;
    return strict_less("int |a| + [int b int c]^1/2 < 2", value, 2.0, tol);
}

}  // namespace

SystemQuantities compute_quantities(const ImpulsiveSystem& system, const CriteriaTolerances& tol) {
    SystemQuantities q;
    const double T = system.period();
    const double rt = tol.quadrature;
    q.int_a = integrate_piecewise(system.a(), 0.0, T, Transform::identity, rt);
    q.int_abs_a = integrate_piecewise(system.a(), 0.0, T, Transform::absolute_value, rt);
    q.int_b = integrate_piecewise(system.b(), 0.0, T, Transform::identity, rt);
    q.int_c = integrate_piecewise(system.c(), 0.0, T, Transform::identity, rt);
    q.int_abs_c = integrate_piecewise(system.c(), 0.0, T, Transform::absolute_value, rt);
    q.int_c_pos = integrate_piecewise(system.c(), 0.0, T, Transform::positive_part, rt);

    const auto& sched = system.schedule();
    q.alpha_product_squared = sched.alpha_product_squared();
    q.impulse_free = sched.is_trivial();
    for (const auto& imp : sched.impulses()) {
        const double r = imp.beta / imp.alpha;
        q.ratio_sum += r;
        q.ratio_pos_sum += std::max(r, 0.0);
        q.ratio_abs_sum += std::abs(r);
    }

    const auto pieces = system.pieces(0.0, T);
    q.min_b = q.min_c = q.min_bc_minus_a2 = std::numeric_limits<double>::infinity();
    for (const auto& piece : pieces) {
        const PieceFns f = piece_fns(piece);
        q.min_b = std::min(q.min_b, minimum_on(f.b, f.pb, piece.lo, piece.hi));
        q.min_c = std::min(q.min_c, minimum_on(f.c, f.pc, piece.lo, piece.hi));
        const Fn det = [&f](double t) {
            const double a = f.a(t);
            return f.b(t) * f.c(t) - a * a;
        };
        std::optional<Polynomial> det_poly;
        if (f.pa && f.pb && f.pc) det_poly = (*f.pb) * (*f.pc) - (*f.pa) * (*f.pa);
        q.min_bc_minus_a2 = std::min(q.min_bc_minus_a2,
                                     minimum_on(det, det_poly ? &*det_poly : nullptr, piece.lo, piece.hi));
        for (double t : sample_grid(piece.lo, piece.hi)) {
            q.max_abs_bc_minus_a2 = std::max(q.max_abs_bc_minus_a2, std::abs(det(t)));
            q.max_abs_input =
                std::max({q.max_abs_input, std::abs(f.a(t)), std::abs(f.b(t)), std::abs(f.c(t))});
        }
    }

    if (system.a().is_identically_zero()) {
        q.int_a2_over_b = 0.0;
    } else if (q.min_b > tol.strict) {
        double sum = 0.0;
        for (const auto& piece : pieces) {
            const PieceFns f = piece_fns(piece);
            sum += integrate_smooth(
                [&f](double t) {
                    const double a = f.a(t);
                    return a * a / f.b(t);
                },
                piece.lo, piece.hi, Transform::identity, rt, 1e-13 * T);
        }
        q.int_a2_over_b = sum;
    }

    if (q.min_b > tol.strict) {
        q.a_over_b_continuous = true;
        for (std::size_t k = 1; k < pieces.size(); ++k) {
            const double t = pieces[k].lo;
            const double left = eval_checked(*pieces[k - 1].a, t) / eval_checked(*pieces[k - 1].b, t);
            const double right = eval_checked(*pieces[k].a, t) / eval_checked(*pieces[k].b, t);
            const double jump = std::abs(right - left) / (1.0 + std::abs(left));
            q.max_a_over_b_jump = std::max(q.max_a_over_b_jump, jump);
            if (jump > tol.continuity) q.a_over_b_continuous = false;
        }
    }
    return q;
}

ConditionCStatus condition_c_status(const ImpulsiveSystem& system, const CriteriaTolerances& tol) {
    ConditionCStatus out;
    const auto& sched = system.schedule();
    for (std::size_t i = 0; i < sched.count(); ++i) {
        if (sched[i].beta != 0.0) {
            out.branch = ConditionCBranch::c1;
            out.nonzero_beta_index = i;
            out.reason = "nonzero beta";
            return out;
        }
    }

    const double T = system.period();
    const auto pieces = system.pieces(0.0, T);
    for (const auto& piece : pieces) {
        if (!piece.a->polynomial() || !piece.b->polynomial()) {
            out.branch = ConditionCBranch::undecidable;
            const bool unknown = piece.a->smoothness() == Smoothness::callable_unknown ||
                                 piece.b->smoothness() == Smoothness::callable_unknown;
            out.reason = unknown ? "a or b has a segment of unknown smoothness"
                                 : "derivative of a/b unavailable for callable segments";
            return out;
        }
    }
    double min_b = std::numeric_limits<double>::infinity();
    for (const auto& piece : pieces) {
        const PieceFns f = piece_fns(piece);
        min_b = std::min(min_b, minimum_on(f.b, f.pb, piece.lo, piece.hi));
    }
    if (!(min_b > tol.strict)) {
        out.branch = ConditionCBranch::undecidable;
        out.reason = "b not bounded away from zero";
        return out;
    }

    const auto ratio = [](const Piece& p, double t) { return (*p.a->polynomial())(t) / (*p.b->polynomial())(t); };
    const auto ratio_deriv = [](const Piece& p, double t) {
        const Polynomial& a = *p.a->polynomial();
        const Polynomial& b = *p.b->polynomial();
        const double bv = b(t);
        return (a.derivative()(t) * bv - a(t) * b.derivative()(t)) / (bv * bv);
    };

    // a/b must be C^1 away from the impulse times to lie in PC^1.
    const auto taus = sched.impulses();
    for (std::size_t k = 1; k < pieces.size(); ++k) {
        const double t = pieces[k].lo;
        const bool impulse_time =
            std::any_of(taus.begin(), taus.end(), [t](const Impulse& imp) { return imp.tau == t; });
        if (impulse_time) continue;
        const double v_left = ratio(pieces[k - 1], t), v_right = ratio(pieces[k], t);
        const double d_left = ratio_deriv(pieces[k - 1], t), d_right = ratio_deriv(pieces[k], t);
        if (std::abs(v_right - v_left) > tol.continuity * (1.0 + std::abs(v_left)) ||
            std::abs(d_right - d_left) > tol.continuity * (1.0 + std::abs(d_left))) {
            out.branch = ConditionCBranch::c2;
            out.reason = "a/b not in PC^1";
            return out;
        }
    }

    double max_expr = 0.0;
    double max_input = 0.0;
    for (const auto& piece : pieces) {
        for (double t : sample_grid(piece.lo, piece.hi)) {
            const double a = (*piece.a->polynomial())(t);
            const double b = (*piece.b->polynomial())(t);
            const double c = eval_checked(*piece.c, t);
            max_expr = std::max(max_expr, std::abs(ratio_deriv(piece, t) - c + a * a / b));
            max_input = std::max({max_input, std::abs(a), std::abs(b), std::abs(c)});
        }
    }
    out.max_expression = max_expr;
    if (max_expr > tol.nonzero * (1.0 + max_input)) {
        out.branch = ConditionCBranch::c3;
        out.reason = "(a/b)' - c + a^2/b not identically zero";
    } else {
        out.branch = ConditionCBranch::none;
        out.reason = "all beta zero, a/b in PC^1 and (a/b)' - c + a^2/b identically zero";
    }
    return out;
}

CriterionReport check_krein(const SystemQuantities& q, const CriteriaTolerances& tol) {
    if (!q.impulse_free) return not_applicable(CriterionId::krein, "impulses present");
    std::vector<Condition> cs{
        nonnegative("b(t) >= 0", q.min_b, q.max_abs_input, tol),
        nonnegative("c(t) >= 0", q.min_c, q.max_abs_input, tol),
        nonnegative("b c - a^2 >= 0", q.min_bc_minus_a2, q.max_abs_input * q.max_abs_input, tol),
        strict_greater("int b int c - (int a)^2 > 0", q.int_b * q.int_c - q.int_a * q.int_a, 0.0, tol),
        krein_sum_condition(q, tol),
    };
    const auto conclusion = conclude(cs);
    return {CriterionId::krein, std::move(cs), conclusion, {}};
}

CriterionReport check_guseinov_kaymakcalan(const SystemQuantities& q, const CriteriaTolerances& tol) {
    if (!q.impulse_free) return not_applicable(CriterionId::guseinov_kaymakcalan, "impulses present");
    const double threshold = tol.nonzero * (1.0 + q.max_abs_input * q.max_abs_input);
    const double nz_margin = q.max_abs_bc_minus_a2 - threshold;
    std::vector<Condition> cs{
        positive(kPositiveB, q.min_b, tol),
        nonnegative("c(t) >= 0", q.min_c, q.max_abs_input, tol),
        nonnegative("b c - a^2 >= 0", q.min_bc_minus_a2, q.max_abs_input * q.max_abs_input, tol),
        {"b c - a^2 not identically 0", nz_margin > 0.0 ? ConditionStatus::satisfied : ConditionStatus::violated,
         nz_margin, false},
        krein_sum_condition(q, tol),
    };
    const auto conclusion = conclude(cs);
    return {CriterionId::guseinov_kaymakcalan, std::move(cs), conclusion, {}};
}

CriterionReport check_guseinov_zafer(const SystemQuantities& q, const CriteriaTolerances& tol) {
    std::vector<Condition> cs{
        product_condition(q, tol),
        positive(kPositiveB, q.min_b, tol),
        integral_positive(q, tol),
        gz_sum_condition(q, tol),
    };
    const auto conclusion = conclude(cs);
    return {CriterionId::guseinov_zafer, std::move(cs), conclusion, {}};
}

CriterionReport check_guseinov_zafer_boundary(const SystemQuantities& q, const ConditionCStatus& cond,
                                              const CriteriaTolerances& tol) {
    std::vector<Condition> cs{
        product_condition(q, tol),   gz_sum_condition(q, tol), positive(kPositiveB, q.min_b, tol),
        integral_zero(q, tol),       continuity_condition(q, tol), condition_c(cond),
    };
    if (cs[4].status == ConditionStatus::violated)
        return {CriterionId::guseinov_zafer_boundary, std::move(cs), Conclusion::not_applicable, "a/b discontinuous"};
    const auto conclusion = conclude(cs);
    return {CriterionId::guseinov_zafer_boundary, std::move(cs), conclusion, {}};
}

CriterionReport check_wang(const SystemQuantities& q, const CriteriaTolerances& tol) {
    if (!q.impulse_free) return not_applicable(CriterionId::wang, "impulses present");
    const double rhs = 4.0 * std::exp(-2.0 * q.int_abs_a);
    std::vector<Condition> cs{
        positive(kPositiveB, q.min_b, tol),
        strict_greater("int (c - a^2/b) > 0", q.int_a2_over_b ? q.int_c - *q.int_a2_over_b : nan, 0.0, tol),
        strict_less("int b int c+ < 4 exp(-2 int |a|)", q.int_b * q.int_c_pos, rhs, tol),
    };
    const auto conclusion = conclude(cs);
    return {CriterionId::wang, std::move(cs), conclusion, {}};
}

CriterionReport check_main(const SystemQuantities& q, const CriteriaTolerances& tol) {
    std::vector<Condition> cs{
        product_condition(q, tol),
        positive(kPositiveB, q.min_b, tol),
        integral_positive(q, tol),
        main_product_condition(q, tol),
    };
    const auto conclusion = conclude(cs);
    return {CriterionId::main, std::move(cs), conclusion, {}};
}

CriterionReport check_main_boundary(const SystemQuantities& q, const ConditionCStatus& cond,
                                    const CriteriaTolerances& tol) {
    std::vector<Condition> cs{
        product_condition(q, tol),  main_product_condition(q, tol),   positive(kPositiveB, q.min_b, tol),
        integral_zero(q, tol),      continuity_condition(q, tol), condition_c(cond),
    };
    if (cs[4].status == ConditionStatus::violated)
        return {CriterionId::main_boundary, std::move(cs), Conclusion::not_applicable, "a/b discontinuous"};
    const auto conclusion = conclude(cs);
    return {CriterionId::main_boundary, std::move(cs), conclusion, {}};
}

CriterionReport check_krein(const ImpulsiveSystem& s, const CriteriaTolerances& tol) {
    return check_krein(compute_quantities(s, tol), tol);
}
CriterionReport check_guseinov_kaymakcalan(const ImpulsiveSystem& s, const CriteriaTolerances& tol) {
    return check_guseinov_kaymakcalan(compute_quantities(s, tol), tol);
}
CriterionReport check_guseinov_zafer(const ImpulsiveSystem& s, const CriteriaTolerances& tol) {
    return check_guseinov_zafer(compute_quantities(s, tol), tol);
}
CriterionReport check_guseinov_zafer_boundary(const ImpulsiveSystem& s, const CriteriaTolerances& tol) {
    return check_guseinov_zafer_boundary(compute_quantities(s, tol), condition_c_status(s, tol), tol);
}
CriterionReport check_wang(const ImpulsiveSystem& s, const CriteriaTolerances& tol) {
    return check_wang(compute_quantities(s, tol), tol);
}
CriterionReport check_main(const ImpulsiveSystem& s, const CriteriaTolerances& tol) {
    return check_main(compute_quantities(s, tol), tol);
}
CriterionReport check_main_boundary(const ImpulsiveSystem& s, const CriteriaTolerances& tol) {
    return check_main_boundary(compute_quantities(s, tol), condition_c_status(s, tol), tol);
}

CriteriaSummary evaluate_all(const ImpulsiveSystem& system, const CriteriaTolerances& tol) {
    CriteriaSummary out;
    const SystemQuantities q = compute_quantities(system, tol);
    out.condition_c = condition_c_status(system, tol);
    out.reports = {
        check_krein(q, tol),
        check_guseinov_kaymakcalan(q, tol),
        check_guseinov_zafer(q, tol),
        check_guseinov_zafer_boundary(q, out.condition_c, tol),
        check_wang(q, tol),
        check_main(q, tol),
        check_main_boundary(q, out.condition_c, tol),
    };
    out.any_certified = std::any_of(out.reports.begin(), out.reports.end(),
                                    [](const CriterionReport& r) { return r.certified(); });
    return out;
}

}  // namespace impulse_floquet
