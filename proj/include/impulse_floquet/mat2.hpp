#pragma once

#include <algorithm>
#include <array>
#include <cmath>

namespace impulse_floquet {

/// Column vector (x, u).
struct Vec2 {
    double x = 0.0;
    double u = 0.0;

    friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.u + b.u}; }
    friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.u - b.u}; }
    friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.u}; }
    friend constexpr bool operator==(Vec2, Vec2) = default;
};

/// Row-major real 2x2 matrix [[xx, xu], [ux, uu]].
///
/// For a fundamental matrix the columns are the solutions (x1, u1) and
/// (x2, u2), so xx = x1, ux = u1, xu = x2, uu = u2.
struct Mat2 {
    double xx = 1.0;
    double xu = 0.0;
    double ux = 0.0;
    double uu = 1.0;

    static constexpr Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static constexpr Mat2 from_columns(Vec2 c1, Vec2 c2) { return {c1.x, c2.x, c1.u, c2.u}; }

    constexpr Vec2 col1() const { return {xx, ux}; }
    constexpr Vec2 col2() const { return {xu, uu}; }

    constexpr double trace() const { return xx + uu; }
    constexpr double det() const { return xx * uu - xu * ux; }

    double frobenius() const { return std::sqrt(xx * xx + xu * xu + ux * ux + uu * uu); }

    /// Largest singular value, closed form for 2x2.
    double spectral_norm() const {
        const double m = std::max({std::abs(xx), std::abs(xu), std::abs(ux), std::abs(uu)});
        if (m == 0.0 || !std::isfinite(m)) return m;
        const Mat2 s{xx / m, xu / m, ux / m, uu / m};
        const double f2 = s.xx * s.xx + s.xu * s.xu + s.ux * s.ux + s.uu * s.uu;
        const double d = s.det();
        const double disc = std::max(0.0, f2 * f2 - 4.0 * d * d);
        return m * std::sqrt(0.5 * (f2 + std::sqrt(disc)));
    }

    bool is_finite() const {
        return std::isfinite(xx) && std::isfinite(xu) && std::isfinite(ux) && std::isfinite(uu);
    }

    friend constexpr Mat2 operator*(const Mat2& a, const Mat2& b) {
        return {a.xx * b.xx + a.xu * b.ux, a.xx * b.xu + a.xu * b.uu,
                a.ux * b.xx + a.uu * b.ux, a.ux * b.xu + a.uu * b.uu};
    }
    friend constexpr Vec2 operator*(const Mat2& m, Vec2 v) {
        return {m.xx * v.x + m.xu * v.u, m.ux * v.x + m.uu * v.u};
    }
    friend constexpr Mat2 operator-(const Mat2& a, const Mat2& b) {
        return {a.xx - b.xx, a.xu - b.xu, a.ux - b.ux, a.uu - b.uu};
    }
    friend constexpr bool operator==(const Mat2&, const Mat2&) = default;
};

}  // namespace impulse_floquet
