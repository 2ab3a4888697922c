#pragma once

#include <optional>
#include <string>
#include <vector>

#include "impulse_floquet/propagation.hpp"

namespace impulse_floquet {

enum class StabilityCategory {
    stable,
    unstable,
    conditionally_stable_not_stable,
    boundary_undecided,
    not_stable_b_neq_1,
};

std::string to_string(StabilityCategory category);

struct StabilityVerdict {
    StabilityCategory category = StabilityCategory::boundary_undecided;
    double trace_a = 0.0;
    double b = 1.0;
    Multipliers multipliers{};
    double u1 = 0.0;        // u1(T), lower-left entry of X(T)
    double x2 = 0.0;        // x2(T), upper-right entry of X(T)
    double margin_a = 0.0;  // 2 - |A|
    double margin_b = 0.0;  // |B - 1|
    /// The category was decided inside the ||A| - 2| <= tol band, where
    /// exact-arithmetic reasoning was replaced by tolerance tests.
    bool in_boundary_band = false;
    /// Initial vector of the bounded Floquet solution (conditionally stable case).
    std::optional<Vec2> bounded_solution;
};

/// Stability classification from monodromy data. `tol` is the band width
/// used for |B - 1|, ||A| - 2| and the off-diagonal zero tests; the
/// monodromy error estimate widens the off-diagonal test into an undecided band.
StabilityVerdict classify(const MonodromyResult& m, double tol = 1e-7);

/// Spectral norms of X^k for k = 1..k_max, each power assembled from the
/// repeated squares along the binary expansion of k. Entries after the first
/// non-finite power are +infinity. Throws std::invalid_argument for k_max < 1.
std::vector<double> growth_bound(const Mat2& x, int k_max);

/// X^k by binary exponentiation.
Mat2 matrix_power(const Mat2& x, long long k);

}  // namespace impulse_floquet
