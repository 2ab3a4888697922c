#include <gtest/gtest.h>

#include "impulse_floquet/system.hpp"

using namespace impulse_floquet;

namespace {

ImpulsiveSystem constant_system(double T, double a, double b, double c, std::vector<Impulse> impulses = {}) {
    return ImpulsiveSystem(PiecewiseFunction::constant(T, a), PiecewiseFunction::constant(T, b),
                           PiecewiseFunction::constant(T, c), ImpulseSchedule(T, std::move(impulses)));
}

bool has_kind(const std::vector<Violation>& report, ViolationKind kind) {
    for (const auto& v : report)
        if (v.kind == kind) return true;
    return false;
}

}  // namespace

TEST(ValidateSystem, ImpulseAtZeroIsReported) {
    const auto report = validate_system(constant_system(1.0, 0.0, 1.0, 1.0, {{0.0, 1.0, 0.0}}));
    ASSERT_FALSE(report.empty());
    EXPECT_TRUE(has_kind(report, ViolationKind::impulse_at_endpoint));
    EXPECT_EQ(report.front().impulse, std::optional<std::size_t>(0));
}

TEST(ValidateSystem, ZeroMultiplierIsReported) {
    const auto report = validate_system(constant_system(1.0, 0.0, 1.0, 1.0, {{0.2, 1.0, 0.0}, {0.6, 0.0, 1.0}}));
    ASSERT_EQ(report.size(), 1u);
    EXPECT_EQ(report[0].kind, ViolationKind::zero_multiplier);
    EXPECT_EQ(report[0].impulse, std::optional<std::size_t>(1));
}

TEST(ValidateSystem, ConstantSystemIsValid) {
    EXPECT_TRUE(validate_system(constant_system(1.0, 0.0, 1.0, 1.0)).empty());
}

TEST(ValidateSystem, OrderingAndRangeAndPeriod) {
    auto report = validate_system(constant_system(1.0, 0.0, 1.0, 1.0, {{0.6, 1.0, 0.0}, {0.4, 1.0, 0.0}}));
    EXPECT_TRUE(has_kind(report, ViolationKind::impulse_order));
    report = validate_system(constant_system(1.0, 0.0, 1.0, 1.0, {{1.5, 1.0, 0.0}}));
    EXPECT_TRUE(has_kind(report, ViolationKind::impulse_outside_period));
    const ImpulsiveSystem mismatch(PiecewiseFunction::constant(2.0, 0.0), PiecewiseFunction::constant(1.0, 1.0),
                                   PiecewiseFunction::constant(1.0, 1.0), ImpulseSchedule(1.0));
    EXPECT_TRUE(has_kind(validate_system(mismatch), ViolationKind::period_mismatch));
}

TEST(ImpulsiveSystem, ImpulseTimesMergedIntoBreakpoints) {
    const auto sys = constant_system(1.0, 0.0, 1.0, 1.0, {{0.25, 2.0, 0.0}, {0.75, 0.5, 0.0}});
    for (const auto* f : {&sys.a(), &sys.b(), &sys.c()}) {
        ASSERT_EQ(f->breakpoints().size(), 2u);
        EXPECT_EQ(f->breakpoints()[0], 0.25);
        EXPECT_EQ(f->breakpoints()[1], 0.75);
    }
    const auto pieces = sys.pieces(0.0, 2.0);
    ASSERT_EQ(pieces.size(), 6u);
    EXPECT_EQ(pieces[0].impulse_at_hi, std::optional<std::size_t>(0));
    EXPECT_EQ(pieces[1].impulse_at_lo, std::optional<std::size_t>(0));
    EXPECT_EQ(pieces[5].impulse_at_lo, std::optional<std::size_t>(1));
    EXPECT_EQ(pieces[5].lo, 1.75);
}

TEST(PositivePartImpulseSum, Examples) {
    EXPECT_EQ(positive_part_impulse_sum(ImpulseSchedule(1.0, {{0.5, -1.0, 0.5}}), 0.0, 1.0), 0.0);
    EXPECT_EQ(positive_part_impulse_sum(ImpulseSchedule(1.0, {{0.3, 2.0, 3.0}, {0.6, 0.5, -1.0}}), 0.0, 1.0), 1.5);
    EXPECT_EQ(positive_part_impulse_sum(ImpulseSchedule(1.0), 0.0, 1.0), 0.0);
}

TEST(PositivePartImpulseSum, HalfOpenAndPeriodic) {
    const ImpulseSchedule s(1.0, {{0.5, 1.0, 1.0}});
    EXPECT_EQ(positive_part_impulse_sum(s, 0.5, 1.0), 1.0);  // lo included
    EXPECT_EQ(positive_part_impulse_sum(s, 0.0, 0.5), 0.0);  // hi excluded
    EXPECT_EQ(positive_part_impulse_sum(s, -1.0, 2.0), 3.0);
}

TEST(JumpMatrix, Examples) {
    const ImpulseSchedule s(1.0, {{0.2, 2.0, 3.0}, {0.4, 1.0, 0.0}, {0.6, -1.0, 0.5}});
    EXPECT_EQ(jump_matrix(s, 0), (Mat2{2.0, 0.0, -3.0, 2.0}));
    EXPECT_EQ(jump_matrix(s, 1), Mat2::identity());
    const Mat2 m = jump_matrix(s, 2);
    EXPECT_EQ(m, (Mat2{-1.0, 0.0, -0.5, -1.0}));
    EXPECT_EQ(m.det(), 1.0);
    EXPECT_THROW((void)jump_matrix(s, 3), std::out_of_range);
}

TEST(JumpMatrix, DeterminantIsAlphaSquared) {
    for (double alpha : {-3.7, -0.1, 0.3, 1.0, 12.5})
        for (double beta : {-2.0, 0.0, 5.5}) {
            const ImpulseSchedule s(1.0, {{0.5, alpha, beta}});
            EXPECT_NEAR(jump_matrix(s, 0).det(), alpha * alpha, 4e-16 * alpha * alpha);
        }
}
