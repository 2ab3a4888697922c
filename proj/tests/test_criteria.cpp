#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "impulse_floquet/criteria.hpp"
#include "impulse_floquet/floquet.hpp"
#include "test_helpers.hpp"

using namespace impulse_floquet;
using test_helpers::constant_system;

namespace {

constexpr double pi = std::numbers::pi;

ImpulsiveSystem cosine_system() {
    return ImpulsiveSystem(PiecewiseFunction::constant(1.0, 0.0), PiecewiseFunction::constant(1.0, 1.0),
                           PiecewiseFunction::callable(1.0, [](double t) { return std::cos(2.0 * pi * t); }),
                           ImpulseSchedule(1.0, {}));
}

const Condition& find_condition(const CriterionReport& r, const std::string& prefix) {
    for (const auto& c : r.conditions)
        if (c.label.rfind(prefix, 0) == 0) return c;
    throw std::runtime_error("no condition " + prefix);
}

/// p(t + s) as a polynomial in t.
Polynomial shift_polynomial(const Polynomial& p, double s) {
    Polynomial out({0.0});
    const Polynomial lin({s, 1.0});
    const auto& coef = p.coefficients();
    for (auto it = coef.rbegin(); it != coef.rend(); ++it) out = out * lin + Polynomial({*it});
    return out;
}

/// f((t + s) mod T) for a piecewise polynomial f.
PiecewiseFunction shift_function(const PiecewiseFunction& f, double s) {
    const double T = f.domain_end();
    std::vector<double> cuts{0.0};
    for (double bp : f.breakpoints()) cuts.push_back(bp);
    cuts.push_back(T);
    std::vector<std::pair<double, Polynomial>> pieces;  // (new start, polynomial)
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const Polynomial& p = *f.segment(k).polynomial();
        const double lo = cuts[k] - s, hi = cuts[k + 1] - s;
        if (hi <= 0.0) {
            pieces.emplace_back(lo + T, shift_polynomial(p, s - T));
        } else if (lo >= 0.0) {
            pieces.emplace_back(lo, shift_polynomial(p, s));
        } else {
            pieces.emplace_back(0.0, shift_polynomial(p, s));
            pieces.emplace_back(lo + T, shift_polynomial(p, s - T));
        }
    }
    std::sort(pieces.begin(), pieces.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    std::vector<double> bps;
    std::vector<Segment> segs;
    for (std::size_t k = 0; k < pieces.size(); ++k) {
        if (k > 0) bps.push_back(pieces[k].first);
        segs.emplace_back(pieces[k].second);
    }
    return PiecewiseFunction(T, bps, segs);
}

ImpulsiveSystem shift_system(const ImpulsiveSystem& sys, double s) {
    const double T = sys.period();
    std::vector<Impulse> imps;
    for (const auto& imp : sys.schedule().impulses()) {
        double tau = imp.tau - s;
        if (tau <= 0.0) tau += T;
        imps.push_back({tau, imp.alpha, imp.beta});
    }
    std::sort(imps.begin(), imps.end(), [](const Impulse& x, const Impulse& y) { return x.tau < y.tau; });
    return ImpulsiveSystem(shift_function(sys.a(), s), shift_function(sys.b(), s), shift_function(sys.c(), s),
                           ImpulseSchedule(T, imps));
}

/// Random system with small coefficients and prod alpha^2 = 1, so that the
/// impulsive criteria certify a useful fraction of draws.
ImpulsiveSystem small_random_system(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double T = 0.3 + 0.7 * unit(rng);
    const auto quad = [&](double base, double amp) {
        return Polynomial({base + amp * (2 * unit(rng) - 1), amp * (2 * unit(rng) - 1), amp * (2 * unit(rng) - 1)});
    };
    const double bp = T * (0.3 + 0.4 * unit(rng));
    auto a = PiecewiseFunction(T, {bp}, {Segment(quad(0.0, 0.3)), Segment(quad(0.0, 0.3))});
    auto b = PiecewiseFunction(T, {bp}, {Segment(quad(1.2, 0.3)), Segment(quad(1.2, 0.3))});
    auto c = PiecewiseFunction(T, {bp}, {Segment(quad(1.0, 1.5)), Segment(quad(1.0, 1.5))});
    std::vector<Impulse> imps;
    const int r = static_cast<int>(3 * unit(rng));
    double prod = 1.0;
    for (int i = 0; i < r; ++i) {
        const double sign = unit(rng) < 0.5 ? -1.0 : 1.0;
        double alpha = sign * (0.7 + 0.6 * unit(rng));
        if (i == r - 1) alpha = sign / prod;
        prod *= alpha;
        imps.push_back({T * (i + 0.2 + 0.6 * unit(rng)) / r, alpha, 0.8 * (2 * unit(rng) - 1)});
    }
    return ImpulsiveSystem(std::move(a), std::move(b), std::move(c), ImpulseSchedule(T, std::move(imps)));
}

}  // namespace

TEST(Krein, UnitSystemCertified) {
    const auto r = check_krein(constant_system(1.0, 0.0, 1.0, 1.0));
    EXPECT_EQ(r.conclusion, Conclusion::certified_stable);
    EXPECT_NEAR(find_condition(r, "int b int c").margin, 1.0, 1e-12);
    EXPECT_NEAR(find_condition(r, "int |a| + [").margin, 1.0, 1e-12);
}

TEST(Krein, LongPeriodInconclusive) {
    const auto r = check_krein(constant_system(3.0, 0.0, 1.0, 1.0));
    EXPECT_EQ(r.conclusion, Conclusion::inconclusive);
    const auto& sum = find_condition(r, "int |a| + [");
    EXPECT_EQ(sum.status, ConditionStatus::violated);
    EXPECT_NEAR(sum.margin, -1.0, 1e-12);
}

TEST(Krein, ImpulseNotApplicable) {
    EXPECT_EQ(check_krein(constant_system(1.0, 0.0, 1.0, 1.0, {{0.5, 2.0, 0.0}})).conclusion,
              Conclusion::not_applicable);
    // An identity jump keeps the criterion applicable.
    EXPECT_EQ(check_krein(constant_system(1.0, 0.0, 1.0, 1.0, {{0.5, 1.0, 0.0}})).conclusion,
              Conclusion::certified_stable);
}

TEST(GuseinovKaymakcalan, Examples) {
    EXPECT_EQ(check_guseinov_kaymakcalan(constant_system(1.0, 0.0, 1.0, 1.0)).conclusion,
              Conclusion::certified_stable);
    const auto zero = check_guseinov_kaymakcalan(constant_system(1.0, 0.0, 1.0, 0.0));
    EXPECT_EQ(zero.conclusion, Conclusion::inconclusive);
    EXPECT_EQ(find_condition(zero, "b c - a^2 not").status, ConditionStatus::violated);

    const ImpulsiveSystem ramp(PiecewiseFunction::constant(1.0, 0.0),
                               PiecewiseFunction::polynomial(1.0, Polynomial({0.0, 1.0})),
                               PiecewiseFunction::constant(1.0, 1.0), ImpulseSchedule(1.0, {}));
    const auto r = check_guseinov_kaymakcalan(ramp);
    EXPECT_EQ(find_condition(r, "b(t) > 0").status, ConditionStatus::violated);
    EXPECT_EQ(r.conclusion, Conclusion::inconclusive);
}

TEST(GuseinovKaymakcalan, PositiveLimitsRequiredAtBreakpoints) {
    // b jumps down to zero from the right at t = 1/2.
    const PiecewiseFunction b(1.0, {0.5}, {Segment(Polynomial({1.0})), Segment(Polynomial({-1.0, 2.0}))});
    const ImpulsiveSystem sys(PiecewiseFunction::constant(1.0, 0.0), b, PiecewiseFunction::constant(1.0, 1.0),
                              ImpulseSchedule(1.0, {}));
    EXPECT_EQ(find_condition(check_guseinov_kaymakcalan(sys), "b(t) > 0").status, ConditionStatus::violated);
}

TEST(GuseinovZafer, Examples) {
    auto r = check_guseinov_zafer(constant_system(1.0, 0.0, 1.0, 1.0, {{0.5, -1.0, 0.5}}));
    EXPECT_EQ(r.conclusion, Conclusion::certified_stable);
    EXPECT_NEAR(find_condition(r, "int (c - a^2/b) +").margin, 0.5, 1e-12);
    EXPECT_NEAR(find_condition(r, "int |a| + [int b]").margin, 1.0, 1e-12);

    r = check_guseinov_zafer(constant_system(1.0, 0.0, 1.0, 1.0, {{0.5, -1.0, -2.0}}));
    EXPECT_EQ(r.conclusion, Conclusion::certified_stable);
    EXPECT_NEAR(find_condition(r, "int (c - a^2/b) +").margin, 3.0, 1e-12);
    EXPECT_NEAR(find_condition(r, "int |a| + [int b]").margin, 2.0 - std::sqrt(3.0), 1e-12);

    r = check_guseinov_zafer(constant_system(1.0, 0.0, 1.0, 1.0, {{0.5, 2.0, 0.0}}));
    EXPECT_EQ(find_condition(r, "prod").status, ConditionStatus::violated);
    EXPECT_EQ(r.conclusion, Conclusion::inconclusive);
}

TEST(GuseinovZafer, VanishingBMakesIntegralUndecidable) {
    const ImpulsiveSystem sys(PiecewiseFunction::constant(1.0, 0.5),
                              PiecewiseFunction::polynomial(1.0, Polynomial({0.0, 1.0})),
                              PiecewiseFunction::constant(1.0, 1.0), ImpulseSchedule(1.0, {}));
    const auto r = check_guseinov_zafer(sys);
    EXPECT_EQ(find_condition(r, "int (c - a^2/b) +").status, ConditionStatus::undecidable);
    EXPECT_EQ(r.conclusion, Conclusion::inconclusive);
}

TEST(GuseinovZaferBoundary, Examples) {
    auto r = check_guseinov_zafer_boundary(constant_system(1.0, 0.0, 1.0, 0.0, {{0.5, 1.0, 0.0}}));
    EXPECT_EQ(find_condition(r, "int (c - a^2/b) + sum beta_i/alpha_i = 0").status, ConditionStatus::satisfied);
    EXPECT_EQ(find_condition(r, "condition (C)").status, ConditionStatus::violated);
    EXPECT_EQ(r.conclusion, Conclusion::inconclusive);

    r = check_guseinov_zafer_boundary(cosine_system());
    EXPECT_EQ(r.conclusion, Conclusion::certified_stable);
    EXPECT_NEAR(find_condition(r, "int |a| + [int b]").margin, 2.0 - std::sqrt(1.0 / pi), 1e-9);

    // c = 1 balanced by one impulse with beta/alpha = -1.
    const auto c1 = constant_system(1.0, 0.0, 1.0, 1.0, {{0.5, 1.0, -1.0}});
    r = check_guseinov_zafer_boundary(c1);
    EXPECT_EQ(find_condition(r, "condition (C)").label, "condition (C): C1");
    EXPECT_EQ(condition_c_status(c1).nonzero_beta_index, 0u);
    EXPECT_EQ(r.conclusion, Conclusion::certified_stable);
}

TEST(Wang, Examples) {
    auto r = check_wang(constant_system(1.0, 1.0, 1.0, 2.0));
    EXPECT_NEAR(find_condition(r, "int (c - a^2/b) > 0").margin, 1.0, 1e-10);
    EXPECT_NEAR(find_condition(r, "int b int c+").margin, 4.0 * std::exp(-2.0) - 2.0, 1e-10);
    EXPECT_EQ(r.conclusion, Conclusion::inconclusive);

    r = check_wang(constant_system(1.0, 0.0, 1.0, 1.0));
    EXPECT_EQ(r.conclusion, Conclusion::certified_stable);
    EXPECT_NEAR(find_condition(r, "int b int c+").margin, 3.0, 1e-12);

    r = check_wang(constant_system(1.0, 0.0, 1.0, -1.0));
    EXPECT_EQ(find_condition(r, "int (c - a^2/b) > 0").status, ConditionStatus::violated);
    EXPECT_EQ(check_wang(constant_system(1.0, 0.0, 1.0, 1.0, {{0.5, -1.0, 0.0}})).conclusion,
              Conclusion::not_applicable);
}

TEST(Main, Examples) {
    auto r = check_main(constant_system(1.0, 0.0, 1.0, 1.0, {{0.5, -1.0, 0.5}}));
    EXPECT_EQ(r.conclusion, Conclusion::certified_stable);
    EXPECT_NEAR(find_condition(r, "exp(2").margin, 3.0, 1e-12);

    r = check_main(constant_system(1.0, 1.0, 1.0, 1.5));
    EXPECT_EQ(r.conclusion, Conclusion::inconclusive);
    EXPECT_NEAR(find_condition(r, "exp(2").margin, 4.0 - std::exp(2.0) * 1.5, 1e-9);

    r = check_main(constant_system(1.0, 0.0, 1.0, 1.0, {{0.5, 2.0, 0.0}}));
    EXPECT_EQ(find_condition(r, "prod").status, ConditionStatus::violated);
}

TEST(MainBoundary, Examples) {
    const auto cos_sys = cosine_system();
    const auto q = compute_quantities(cos_sys);
    EXPECT_NEAR(q.int_c_pos, 1.0 / pi, 1e-9);
    EXPECT_NEAR(q.int_c, 0.0, 1e-12);
    const auto r = check_main_boundary(cos_sys);
    EXPECT_EQ(r.conclusion, Conclusion::certified_stable);
    EXPECT_EQ(condition_c_status(cos_sys).branch, ConditionCBranch::c3);
    EXPECT_NEAR(find_condition(r, "exp(2").margin, 4.0 - 1.0 / pi, 1e-9);
    EXPECT_EQ(classify(monodromy(cos_sys)).category, StabilityCategory::stable);

    EXPECT_EQ(check_main_boundary(constant_system(1.0, 0.0, 0.0, 0.0, {{0.5, 1.0, 0.0}})).conclusion,
              Conclusion::inconclusive);
    EXPECT_EQ(check_main_boundary(constant_system(1.0, 0.0, 1.0, 0.0, {{0.5, 1.0, 0.0}})).conclusion,
              Conclusion::inconclusive);

    // a/b jumps from 0 to 1 at t = 1/2.
    const ImpulsiveSystem jump(PiecewiseFunction(1.0, {0.5}, {Segment(Polynomial({0.0})), Segment(Polynomial({1.0}))}),
                               PiecewiseFunction::constant(1.0, 1.0), PiecewiseFunction::constant(1.0, 0.5),
                               ImpulseSchedule(1.0, {}));
    const auto nj = check_main_boundary(jump);
    EXPECT_EQ(nj.conclusion, Conclusion::not_applicable);
    EXPECT_EQ(find_condition(nj, "a/b continuous").status, ConditionStatus::violated);
}

TEST(ConditionC, Branches) {
    const auto c1 = condition_c_status(constant_system(1.0, 0.0, 1.0, 1.0, {{0.3, 1.0, 0.0}, {0.6, 1.0, 0.3}}));
    EXPECT_EQ(c1.branch, ConditionCBranch::c1);
    EXPECT_EQ(c1.nonzero_beta_index, 1u);

    const auto c3 = condition_c_status(constant_system(1.0, 0.0, 1.0, 1.0));
    EXPECT_EQ(c3.branch, ConditionCBranch::c3);
    EXPECT_NEAR(c3.max_expression, 1.0, 1e-15);

    const ImpulsiveSystem opaque(PiecewiseFunction::callable(1.0, [](double t) { return t; }),
                                 PiecewiseFunction::constant(1.0, 1.0), PiecewiseFunction::constant(1.0, 1.0),
                                 ImpulseSchedule(1.0, {}));
    EXPECT_EQ(condition_c_status(opaque).branch, ConditionCBranch::undecidable);

    // a/b = |t - 1/2| has a derivative jump at 1/2.
    const ImpulsiveSystem kink(
        PiecewiseFunction(1.0, {0.5}, {Segment(Polynomial({0.5, -1.0})), Segment(Polynomial({-0.5, 1.0}))}),
        PiecewiseFunction::constant(1.0, 1.0), PiecewiseFunction::constant(1.0, 1.0), ImpulseSchedule(1.0, {}));
    EXPECT_EQ(condition_c_status(kink).branch, ConditionCBranch::c2);

    // a = t, b = 1, c = 1 + t^2 makes the expression vanish identically.
    const ImpulsiveSystem riccati(PiecewiseFunction::polynomial(1.0, Polynomial({0.0, 1.0})),
                                  PiecewiseFunction::constant(1.0, 1.0),
                                  PiecewiseFunction::polynomial(1.0, Polynomial({1.0, 0.0, 1.0})),
                                  ImpulseSchedule(1.0, {}));
    EXPECT_EQ(condition_c_status(riccati).branch, ConditionCBranch::none);
}

TEST(EvaluateAll, Examples) {
    auto s = evaluate_all(constant_system(1.0, 0.0, 1.0, 1.0));
    ASSERT_EQ(s.reports.size(), 7u);
    const std::vector<Conclusion> expected{Conclusion::certified_stable, Conclusion::certified_stable,
                                           Conclusion::certified_stable, Conclusion::inconclusive,
                                           Conclusion::certified_stable, Conclusion::certified_stable,
                                           Conclusion::inconclusive};
    for (std::size_t k = 0; k < 7; ++k) EXPECT_EQ(s.reports[k].conclusion, expected[k]) << k;
    EXPECT_EQ(s.reports[0].id, CriterionId::krein);
    EXPECT_EQ(s.reports[6].id, CriterionId::main_boundary);
    EXPECT_TRUE(s.any_certified);

    EXPECT_FALSE(evaluate_all(constant_system(1.0, 0.0, 0.0, 0.0)).any_certified);
    EXPECT_FALSE(evaluate_all(constant_system(1.0, 0.0, 0.0, 0.0, {{0.5, -1.0, 0.7}})).any_certified);
}

TEST(EvaluateAll, CertifiedIffAllSatisfied) {
    std::mt19937_64 rng(11);
    for (int n = 0; n < 100; ++n) {
        for (const auto& r : evaluate_all(small_random_system(rng)).reports) {
            if (r.conclusion == Conclusion::not_applicable) continue;
            const bool all = std::all_of(r.conditions.begin(), r.conditions.end(),
                                         [](const Condition& c) { return c.status == ConditionStatus::satisfied; });
            EXPECT_EQ(all, r.certified());
        }
    }
}

TEST(CriteriaProperty, Soundness) {
    std::mt19937_64 rng(2024);
    const CriteriaTolerances tol;
    int certified = 0;
    for (int n = 0; n < 400; ++n) {
        const auto sys = small_random_system(rng);
        const auto summary = evaluate_all(sys, tol);
        const bool decisive = std::any_of(summary.reports.begin(), summary.reports.end(), [&](const auto& r) {
            return r.certified() && r.min_strict_margin() > 10.0 * tol.strict;
        });
        if (!decisive) continue;
        ++certified;
        const auto v = classify(monodromy(sys));
        EXPECT_EQ(v.category, StabilityCategory::stable) << "system " << n << " A=" << v.trace_a;
        EXPECT_LT(v.trace_a * v.trace_a, 4.0);
    }
    EXPECT_GT(certified, 40);
}

TEST(CriteriaProperty, NestingWithZeroA) {
    std::mt19937_64 rng(5);
    int agree = 0;
    for (int n = 0; n < 200; ++n) {
        const auto base = small_random_system(rng);
        const ImpulsiveSystem sys(PiecewiseFunction::constant(base.period(), 0.0), base.b(), base.c(),
                                  base.schedule());
        const auto q = compute_quantities(sys);
        ASSERT_EQ(q.int_abs_a, 0.0);
        const bool gz = check_guseinov_zafer(q, {}).certified();
        const bool mn = check_main(q, {}).certified();
        EXPECT_EQ(gz, mn);
        agree += gz;
    }
    EXPECT_GT(agree, 10);
}

TEST(CriteriaProperty, MainInvariantUnderShiftAndRelabel) {
    std::mt19937_64 rng(77);
    for (int n = 0; n < 60; ++n) {
        const auto sys = small_random_system(rng);
        const auto ref = check_main(sys);
        const double s = sys.period() * std::uniform_real_distribution<double>(0.05, 0.95)(rng);
        const auto shifted = check_main(shift_system(sys, s));
        ASSERT_EQ(ref.conditions.size(), shifted.conditions.size());
        EXPECT_EQ(ref.conclusion, shifted.conclusion);
        for (std::size_t k = 0; k < ref.conditions.size(); ++k) {
            EXPECT_NEAR(ref.conditions[k].margin, shifted.conditions[k].margin,
                        1e-9 * (1.0 + std::abs(ref.conditions[k].margin)))
                << ref.conditions[k].label;
        }
    }
}

TEST(CriteriaProperty, MarginDerivativeInC) {
    const double T = 0.8, a = 0.2, b = 1.1, c = 1.0, eps = 1e-5;
    const auto margin = [&](double cc) {
        return find_condition(check_main(constant_system(T, a, b, cc, {{0.4, -1.0, 0.3}})), "exp(2").margin;
    };
    const double slope = (margin(c + eps) - margin(c - eps)) / (2.0 * eps);
    EXPECT_NEAR(slope, -std::exp(2.0 * a * T) * b * T * T, 1e-7);
}
