#include "impulse_floquet/floquet.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace impulse_floquet {

std::string to_string(StabilityCategory category) {
    switch (category) {
        case StabilityCategory::stable: return "stable";
        case StabilityCategory::unstable: return "unstable";
        case StabilityCategory::conditionally_stable_not_stable: return "conditionally-stable-not-stable";
        case StabilityCategory::boundary_undecided: return "boundary-undecided";
        case StabilityCategory::not_stable_b_neq_1: return "not-stable-B-neq-1";
    }
    return "unknown";
}

namespace {

Vec2 eigenvector(const Mat2& x, double rho) {
    const Vec2 from_row1{-x.xu, x.xx - rho};
    const Vec2 from_row2{x.uu - rho, -x.ux};
    const double n1 = std::hypot(from_row1.x, from_row1.u);
    const double n2 = std::hypot(from_row2.x, from_row2.u);
    if (n1 == 0.0 && n2 == 0.0) return {1.0, 0.0};
    return n1 >= n2 ? (1.0 / n1) * from_row1 : (1.0 / n2) * from_row2;
}

}  // namespace

StabilityVerdict classify(const MonodromyResult& m, double tol) {
    const Mat2& x = m.monodromy.matrix;
    StabilityVerdict v;
    v.trace_a = m.trace_a;
    v.b = m.b;
    v.multipliers = m.multipliers;
    v.u1 = x.ux;
    v.x2 = x.xu;
    v.margin_a = 2.0 - std::abs(m.trace_a);
    v.margin_b = std::abs(m.b - 1.0);

    if (v.margin_b > tol) {
        v.category = StabilityCategory::not_stable_b_neq_1;
        return v;
    }
    if (v.margin_a > tol) {
        v.category = StabilityCategory::stable;
        return v;
    }
    if (v.margin_a < -tol) {
        v.category = StabilityCategory::unstable;
        return v;
    }

    v.in_boundary_band = true;
    const double ambiguity = tol + m.error_estimate;
    const auto clearly_zero = [&](double e) { return std::abs(e) <= tol; };
    const auto clearly_nonzero = [&](double e) { return std::abs(e) > ambiguity; };
    if (clearly_zero(v.u1) && clearly_zero(v.x2)) {
        v.category = StabilityCategory::stable;
    } else if (clearly_nonzero(v.u1) || clearly_nonzero(v.x2)) {
        v.category = StabilityCategory::conditionally_stable_not_stable;
        v.bounded_solution = eigenvector(x, m.trace_a < 0.0 ? -1.0 : 1.0);
    } else {
        v.category = StabilityCategory::boundary_undecided;
    }
    return v;
}

Mat2 matrix_power(const Mat2& x, long long k) {
    Mat2 result = Mat2::identity();
    Mat2 square = x;
    while (k > 0) {
        if (k & 1) result = result * square;
        k >>= 1;
        if (k > 0) square = square * square;
    }
    return result;
}

std::vector<double> growth_bound(const Mat2& x, int k_max) {
    if (k_max < 1) throw std::invalid_argument("k_max must be at least 1");
    std::vector<Mat2> squares{x};
    while ((1LL << squares.size()) <= k_max) squares.push_back(squares.back() * squares.back());

    std::vector<double> norms;
    norms.reserve(static_cast<std::size_t>(k_max));
    bool overflowed = false;
    for (int k = 1; k <= k_max; ++k) {
        if (overflowed) {
            norms.push_back(std::numeric_limits<double>::infinity());
            continue;
        }
        Mat2 p = Mat2::identity();
        for (std::size_t bit = 0; bit < squares.size(); ++bit)
            if (k & (1 << bit)) p = p * squares[bit];
        const double n = p.spectral_norm();
        if (!std::isfinite(n) || !p.is_finite()) {
            overflowed = true;
            norms.push_back(std::numeric_limits<double>::infinity());
        } else {
            norms.push_back(n);
        }
    }
    return norms;
}

}  // namespace impulse_floquet
