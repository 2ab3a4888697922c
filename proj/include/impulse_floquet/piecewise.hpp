#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace impulse_floquet {

/// Which one-sided limit to take at a breakpoint.
enum class Side { left, right };

/// Integrand transform applied before integration.
enum class Transform { identity, absolute_value, positive_part };

/// What is known about a segment's regularity.
enum class Smoothness {
    polynomial,        // derivative available in closed form
    callable_smooth,   // declared C^1 on the closed segment, derivative not available
    callable_unknown,  // nothing known beyond continuity
};

/// Polynomial in absolute time t, coefficients in ascending degree.
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::vector<double> coefficients);

    static Polynomial constant(double value) { return Polynomial({value}); }

    double operator()(double t) const;
    Polynomial derivative() const;
    /// Antiderivative vanishing at t = 0.
    Polynomial antiderivative() const;

    const std::vector<double>& coefficients() const { return coeffs_; }
    /// Degree of the trimmed representation; the zero polynomial has degree 0.
    int degree() const;
    bool is_zero() const;

    friend Polynomial operator+(const Polynomial& p, const Polynomial& q);
    friend Polynomial operator-(const Polynomial& p, const Polynomial& q);
    friend Polynomial operator*(const Polynomial& p, const Polynomial& q);
    friend Polynomial operator*(double s, const Polynomial& p);

private:
    std::vector<double> coeffs_;
};

using Callable = std::function<double(double)>;

/// Evaluator for one interval of a piecewise function. Total on the closed interval.
class Segment {
public:
    Segment(Polynomial p);  // NOLINT(google-explicit-constructor)
    Segment(Callable f, Smoothness smoothness);

    double operator()(double t) const;
    Smoothness smoothness() const { return smoothness_; }
    /// Non-null exactly when smoothness() == Smoothness::polynomial.
    const Polynomial* polynomial() const { return std::get_if<Polynomial>(&evaluator_); }

    Segment scaled(double s) const;

private:
    std::variant<Polynomial, std::shared_ptr<const Callable>> evaluator_;
    Smoothness smoothness_;
};

/// Real function on [0, domain_end], smooth between known breakpoints, with
/// finite one-sided limits at each breakpoint. Immutable.
class PiecewiseFunction {
public:
    /// Throws std::invalid_argument unless breakpoints are strictly increasing
    /// inside (0, domain_end) and there is exactly one segment more than breakpoints.
    PiecewiseFunction(double domain_end, std::vector<double> breakpoints, std::vector<Segment> segments);

    static PiecewiseFunction constant(double domain_end, double value);
    static PiecewiseFunction polynomial(double domain_end, Polynomial p);
    static PiecewiseFunction callable(double domain_end, Callable f,
                                      Smoothness smoothness = Smoothness::callable_smooth);

    double domain_end() const { return domain_end_; }
    std::span<const double> breakpoints() const { return breakpoints_; }
    std::size_t segment_count() const { return segments_.size(); }
    const Segment& segment(std::size_t k) const { return segments_[k]; }
    double segment_begin(std::size_t k) const { return k == 0 ? 0.0 : breakpoints_[k - 1]; }
    double segment_end(std::size_t k) const { return k == breakpoints_.size() ? domain_end_ : breakpoints_[k]; }

    /// Index of the segment supplying the one-sided limit at t.
    std::size_t segment_index(double t, Side side) const;
    /// Segment whose open interval contains an interior point t.
    const Segment& segment_at(double t) const { return segments_[segment_index(t, Side::right)]; }

    /// One-sided limit at t. Throws DomainError for t outside [0, T], for
    /// side == left at 0 and side == right at T. Throws EvaluationError if the
    /// evaluator returns a non-finite value.
    double eval(double t, Side side) const;

    /// Same function with additional breakpoints (duplicates and values not
    /// strictly inside the domain are ignored).
    PiecewiseFunction with_breakpoints(std::span<const double> extra) const;
    PiecewiseFunction scaled(double s) const;

    bool all_polynomial() const;
    bool is_identically_zero() const;

private:
    double domain_end_;
    std::vector<double> breakpoints_;
    std::vector<Segment> segments_;
};

/// Evaluate segment k at t with the finiteness check used throughout.
double eval_checked(const Segment& segment, double t);

/// Integral of transform(f) over [lo, hi] with 0 <= lo <= hi <= T. Quadrature
/// is split at every breakpoint and, for non-identity transforms, at every
/// detected sign change of f.
double integrate_piecewise(const PiecewiseFunction& f, double lo, double hi,
                           Transform transform = Transform::identity, double rel_tol = 1e-10);

/// Integral over an arbitrary range lo <= hi of the T-periodic extension of f.
double integrate_periodic(const PiecewiseFunction& f, double lo, double hi,
                          Transform transform = Transform::identity, double rel_tol = 1e-10);

/// Integral of transform(g) over [lo, hi] for a function smooth on that
/// interval, with sign-change splitting when the transform needs it.
double integrate_smooth(const std::function<double(double)>& g, double lo, double hi, Transform transform,
                        double rel_tol, double root_resolution);

}  // namespace impulse_floquet
