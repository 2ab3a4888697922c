#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "impulse_floquet/descriptor.hpp"
#include "impulse_floquet/errors.hpp"
#include "impulse_floquet/harness.hpp"
#include "test_helpers.hpp"

using namespace impulse_floquet;
using namespace impulse_floquet::harness;

TEST(Generate, ImpulseFreeMode) {
    GeneratorSpec spec;
    spec.mode = ConstraintMode::impulse_free;
    spec.impulses_min = 2;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        spec.seed = seed;
        EXPECT_EQ(generate(spec).schedule().count(), 0u);
    }
}

TEST(Generate, AlphaProductOne) {
    GeneratorSpec spec;
    spec.mode = ConstraintMode::force_alpha_product_one;
    spec.impulses_min = 1;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        spec.seed = seed;
        EXPECT_NEAR(generate(spec).schedule().alpha_product_squared(), 1.0, 1e-14);
    }
}

TEST(Generate, AlphaProductOneThirdAlpha) {
    // With alphas 2 and 3 drawn first, the third is +-1/6.
    GeneratorSpec spec;
    spec.mode = ConstraintMode::force_alpha_product_one;
    spec.impulses_min = spec.impulses_max = 3;
    spec.alpha_min = spec.alpha_max = 2.0;
    const auto sys = generate(spec);
    const auto& s = sys.schedule();
    EXPECT_NEAR(std::abs(s[2].alpha), 1.0 / (std::abs(s[0].alpha) * std::abs(s[1].alpha)), 1e-15);
    spec.alpha_min = 3.0;
    spec.alpha_max = 3.0;
    spec.impulses_min = spec.impulses_max = 2;
    EXPECT_NEAR(std::abs(generate(spec).schedule()[1].alpha), 1.0 / 3.0, 1e-15);
}

TEST(Generate, Deterministic) {
    GeneratorSpec spec;
    spec.seed = 1234;
    spec.mode = ConstraintMode::force_main;
    EXPECT_EQ(system_to_json(generate(spec)), system_to_json(generate(spec)));
    auto other = spec;
    other.seed = 1235;
    EXPECT_NE(system_to_json(generate(spec)), system_to_json(generate(other)));
}

TEST(Generate, ValidSystems) {
    GeneratorSpec spec;
    for (auto mode : {ConstraintMode::unconstrained, ConstraintMode::force_main, ConstraintMode::force_guseinov_zafer,
                      ConstraintMode::force_krein, ConstraintMode::force_wang}) {
        spec.mode = mode;
        for (std::uint64_t i = 0; i < 40; ++i) {
            const auto sys = generate(offset_spec(spec, i));
            EXPECT_TRUE(validate_system(sys).empty()) << to_string(mode) << " " << i;
        }
    }
}

TEST(Generate, ForcingModesCertifyTheirCriterion) {
    GeneratorSpec spec;
    spec.seed = 7;
    for (std::uint64_t i = 0; i < 50; ++i) {
        spec.mode = ConstraintMode::force_main;
        const auto main = check_main(generate(offset_spec(spec, i)));
        EXPECT_TRUE(main.certified());
        EXPECT_GE(main.min_strict_margin(), spec.margin * (1.0 - 1e-6));
        spec.mode = ConstraintMode::force_guseinov_zafer;
        EXPECT_TRUE(check_guseinov_zafer(generate(offset_spec(spec, i))).certified());
        spec.mode = ConstraintMode::force_krein;
        EXPECT_TRUE(check_krein(generate(offset_spec(spec, i))).certified());
        spec.mode = ConstraintMode::force_wang;
        EXPECT_TRUE(check_wang(generate(offset_spec(spec, i))).certified());
    }
}

TEST(Generate, UnsatisfiableConstraintThrows) {
    GeneratorSpec spec;
    spec.mode = ConstraintMode::force_guseinov_zafer;
    spec.c_offset = -50.0;
    spec.c_amplitude = 0.0;
    spec.beta_max = 0.0;
    spec.max_attempts = 5;
    EXPECT_THROW(generate(spec), GenerationError);
    spec.segments_min = 0;
    EXPECT_THROW(generate(spec), std::invalid_argument);
}

TEST(Generate, CoverageTelemetry) {
    GeneratorSpec spec;
    spec.seed = 99;
    bool negative_alpha = false, beta_pos = false, beta_neg = false, c_sign_change = false, a_nonzero = false;
    for (std::uint64_t i = 0; i < 500; ++i) {
        const auto sys = generate(offset_spec(spec, i));
        for (const auto& imp : sys.schedule().impulses()) {
            negative_alpha |= imp.alpha < 0.0;
            beta_pos |= imp.beta > 0.0;
            beta_neg |= imp.beta < 0.0;
        }
        const auto q = compute_quantities(sys);
        c_sign_change |= q.int_c_pos > 0.0 && q.int_c_pos < q.int_abs_c;
        a_nonzero |= !sys.a().is_identically_zero();
    }
    EXPECT_TRUE(negative_alpha);
    EXPECT_TRUE(beta_pos && beta_neg);
    EXPECT_TRUE(c_sign_change);
    EXPECT_TRUE(a_nonzero);
}

TEST(SoundnessSweep, ForcingModesHaveNoViolations) {
    GeneratorSpec spec;
    spec.seed = 3;
    for (auto mode : {ConstraintMode::force_main, ConstraintMode::force_guseinov_zafer}) {
        spec.mode = mode;
        const auto s = soundness_sweep(spec, 150);
        EXPECT_EQ(s.violations, 0u);
        EXPECT_EQ(s.failures, 0u);
        EXPECT_EQ(s.certified, 150u);
        EXPECT_GT(s.min_gap, 0.0);
    }
}

TEST(SoundnessSweep, EmptyRun) {
    const auto s = soundness_sweep(GeneratorSpec{}, 0);
    EXPECT_EQ(s.n, 0u);
    EXPECT_EQ(s.certified, 0u);
    EXPECT_TRUE(s.records.empty());
    EXPECT_EQ(to_csv(s), "seed-offset,A,B,krein,guseinov-kaymakcalan,guseinov-zafer,guseinov-zafer-boundary,wang,"
                         "main,main-boundary,verdict,status\n");
}

TEST(SoundnessSweep, DeterministicAcrossWorkerCounts) {
    GeneratorSpec spec;
    spec.seed = 11;
    spec.mode = ConstraintMode::force_alpha_product_one;
    SweepOptions one, four;
    four.workers = 4;
    const auto a = soundness_sweep(spec, 60, one);
    const auto b = soundness_sweep(spec, 60, four);
    EXPECT_EQ(to_json(a, true).dump(), to_json(b, true).dump());
    EXPECT_EQ(to_csv(a), to_csv(b));
}

TEST(SoundnessSweep, WangKreinCrossConsistency) {
    GeneratorSpec spec;
    spec.seed = 5;
    spec.mode = ConstraintMode::force_wang;
    spec.a_amplitude = 0.0;
    const auto s = soundness_sweep(spec, 100);
    EXPECT_EQ(s.wang_zero_a, 100u);
    EXPECT_EQ(s.wang_zero_a_krein_sum, s.wang_zero_a);
}

TEST(LyapunovSweep, SineFamily) {
    std::vector<ImpulsiveSystem> systems;
    for (double c : {1.0, std::numbers::pi * std::numbers::pi, 20.0})
        systems.push_back(test_helpers::constant_system(1.0, 0.0, 1.0, c));
    const auto s = lyapunov_sweep(systems);
    EXPECT_EQ(s.failures, 0u);
    EXPECT_GT(s.pairs, 10u);
    EXPECT_NEAR(s.min_lhs, std::numbers::pi * std::numbers::pi, 1e-6);
}

TEST(LyapunovSweep, NonpositiveSecondFactorHasNoPairs) {
    std::vector<ImpulsiveSystem> systems{test_helpers::constant_system(1.0, 0.3, 1.0, -1.0, {{0.5, -2.0, 1.0}}),
                                         test_helpers::constant_system(1.0, 0.0, 2.0, 0.0)};
    const auto s = lyapunov_sweep(systems);
    EXPECT_EQ(s.pairs, 0u);
    EXPECT_EQ(s.systems_with_pairs, 0u);
    EXPECT_EQ(s.failures, 0u);
}

TEST(LyapunovSweep, RandomFamilyHolds) {
    GeneratorSpec spec;
    spec.seed = 8;
    spec.c_offset = 3.0;
    const auto s = lyapunov_sweep(spec, 60);
    EXPECT_EQ(s.failures, 0u);
    EXPECT_GT(s.pairs, 20u);
    EXPECT_GE(s.min_lhs, 4.0 - 1e-6);
}
