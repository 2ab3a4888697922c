#include "impulse_floquet/piecewise.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "impulse_floquet/errors.hpp"
#include "impulse_floquet/quadrature.hpp"

namespace impulse_floquet {

// ---------------------------------------------------------------------------
// Polynomial

Polynomial::Polynomial(std::vector<double> coefficients) : coeffs_(std::move(coefficients)) {
    if (coeffs_.empty()) coeffs_.push_back(0.0);
}

double Polynomial::operator()(double t) const {
    double acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * t + *it;
    return acc;
}

Polynomial Polynomial::derivative() const {
    if (coeffs_.size() <= 1) return Polynomial({0.0});
    std::vector<double> d(coeffs_.size() - 1);
    for (std::size_t k = 1; k < coeffs_.size(); ++k) d[k - 1] = static_cast<double>(k) * coeffs_[k];
    return Polynomial(std::move(d));
}

Polynomial Polynomial::antiderivative() const {
    std::vector<double> p(coeffs_.size() + 1, 0.0);
    for (std::size_t k = 0; k < coeffs_.size(); ++k) p[k + 1] = coeffs_[k] / static_cast<double>(k + 1);
    return Polynomial(std::move(p));
}

int Polynomial::degree() const {
    for (std::size_t k = coeffs_.size(); k-- > 1;)
        if (coeffs_[k] != 0.0) return static_cast<int>(k);
    return 0;
}

bool Polynomial::is_zero() const {
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](double c) { return c == 0.0; });
}

Polynomial operator+(const Polynomial& p, const Polynomial& q) {
    std::vector<double> r(std::max(p.coeffs_.size(), q.coeffs_.size()), 0.0);
    for (std::size_t k = 0; k < p.coeffs_.size(); ++k) r[k] += p.coeffs_[k];
    for (std::size_t k = 0; k < q.coeffs_.size(); ++k) r[k] += q.coeffs_[k];
    return Polynomial(std::move(r));
}

Polynomial operator-(const Polynomial& p, const Polynomial& q) { return p + (-1.0) * q; }

Polynomial operator*(const Polynomial& p, const Polynomial& q) {
    std::vector<double> r(p.coeffs_.size() + q.coeffs_.size() - 1, 0.0);
    for (std::size_t i = 0; i < p.coeffs_.size(); ++i)
        for (std::size_t j = 0; j < q.coeffs_.size(); ++j) r[i + j] += p.coeffs_[i] * q.coeffs_[j];
    return Polynomial(std::move(r));
}

Polynomial operator*(double s, const Polynomial& p) {
    std::vector<double> r = p.coeffs_;
    for (double& c : r) c *= s;
    return Polynomial(std::move(r));
}

// ---------------------------------------------------------------------------
// Segment

Segment::Segment(Polynomial p) : evaluator_(std::move(p)), smoothness_(Smoothness::polynomial) {}

Segment::Segment(Callable f, Smoothness smoothness)
    : evaluator_(std::make_shared<const Callable>(std::move(f))), smoothness_(smoothness) {
    if (smoothness_ == Smoothness::polynomial)
        throw std::invalid_argument("callable segment cannot be flagged polynomial");
}

double Segment::operator()(double t) const {
    if (const auto* p = std::get_if<Polynomial>(&evaluator_)) return (*p)(t);
    return (*std::get<std::shared_ptr<const Callable>>(evaluator_))(t);
}

Segment Segment::scaled(double s) const {
    if (const auto* p = std::get_if<Polynomial>(&evaluator_)) return Segment(s * *p);
    auto f = std::get<std::shared_ptr<const Callable>>(evaluator_);
    return Segment([f, s](double t) { return s * (*f)(t); }, smoothness_);
}

double eval_checked(const Segment& segment, double t) {
    const double v = segment(t);
    if (!std::isfinite(v)) {
        std::ostringstream msg;
        msg << "non-finite coefficient value at t = " << t;
        throw EvaluationError(msg.str(), t);
    }
    return v;
}

// ---------------------------------------------------------------------------
// PiecewiseFunction

PiecewiseFunction::PiecewiseFunction(double domain_end, std::vector<double> breakpoints,
                                     std::vector<Segment> segments)
    : domain_end_(domain_end), breakpoints_(std::move(breakpoints)), segments_(std::move(segments)) {
    if (!(domain_end_ > 0.0) || !std::isfinite(domain_end_))
        throw std::invalid_argument("domain end must be positive and finite");
    if (segments_.size() != breakpoints_.size() + 1)
        throw std::invalid_argument("need exactly one more segment than breakpoints");
    double prev = 0.0;
    for (double b : breakpoints_) {
        if (!(b > prev) || !(b < domain_end_))
            throw std::invalid_argument("breakpoints must be strictly increasing inside (0, T)");
        prev = b;
    }
}

PiecewiseFunction PiecewiseFunction::constant(double domain_end, double value) {
    return polynomial(domain_end, Polynomial::constant(value));
}

PiecewiseFunction PiecewiseFunction::polynomial(double domain_end, Polynomial p) {
    return PiecewiseFunction(domain_end, {}, {Segment(std::move(p))});
}

PiecewiseFunction PiecewiseFunction::callable(double domain_end, Callable f, Smoothness smoothness) {
    return PiecewiseFunction(domain_end, {}, {Segment(std::move(f), smoothness)});
}

std::size_t PiecewiseFunction::segment_index(double t, Side side) const {
    if (side == Side::left)
        return static_cast<std::size_t>(std::lower_bound(breakpoints_.begin(), breakpoints_.end(), t) -
                                        breakpoints_.begin());
    return static_cast<std::size_t>(std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t) -
                                    breakpoints_.begin());
}

double PiecewiseFunction::eval(double t, Side side) const {
    if (!(t >= 0.0 && t <= domain_end_)) {
        std::ostringstream msg;
        msg << "t = " << t << " outside [0, " << domain_end_ << "]";
        throw DomainError(msg.str());
    }
    if (side == Side::left && t == 0.0) throw DomainError("left limit undefined at t = 0");
    if (side == Side::right && t == domain_end_) throw DomainError("right limit undefined at t = T");
    return eval_checked(segments_[segment_index(t, side)], t);
}

PiecewiseFunction PiecewiseFunction::with_breakpoints(std::span<const double> extra) const {
    std::vector<double> merged = breakpoints_;
    for (double b : extra)
        if (b > 0.0 && b < domain_end_) merged.push_back(b);
    std::sort(merged.begin(), merged.end());
    merged.erase(std::unique(merged.begin(), merged.end()), merged.end());

    std::vector<Segment> segments;
    segments.reserve(merged.size() + 1);
    double lo = 0.0;
    for (std::size_t k = 0; k <= merged.size(); ++k) {
        const double hi = k < merged.size() ? merged[k] : domain_end_;
        segments.push_back(segment_at(0.5 * (lo + hi)));
        lo = hi;
    }
    return PiecewiseFunction(domain_end_, std::move(merged), std::move(segments));
}

PiecewiseFunction PiecewiseFunction::scaled(double s) const {
    std::vector<Segment> segments;
    segments.reserve(segments_.size());
    for (const auto& seg : segments_) segments.push_back(seg.scaled(s));
    return PiecewiseFunction(domain_end_, breakpoints_, std::move(segments));
}

bool PiecewiseFunction::all_polynomial() const {
    return std::all_of(segments_.begin(), segments_.end(),
                       [](const Segment& s) { return s.polynomial() != nullptr; });
}

bool PiecewiseFunction::is_identically_zero() const {
    return std::all_of(segments_.begin(), segments_.end(), [](const Segment& s) {
        return s.polynomial() != nullptr && s.polynomial()->is_zero();
    });
}

// ---------------------------------------------------------------------------
// Quadrature

namespace {

double apply(Transform transform, double v) {
    switch (transform) {
        case Transform::identity: return v;
        case Transform::absolute_value: return std::abs(v);
        case Transform::positive_part: return std::max(v, 0.0);
    }
    return v;
}

}  // namespace

double integrate_smooth(const std::function<double(double)>& g, double lo, double hi, Transform transform,
                        double rel_tol, double root_resolution) {
    if (!(hi > lo)) return 0.0;
    if (transform == Transform::identity) return quadrature::adaptive(g, lo, hi, rel_tol);

    std::vector<double> cuts{lo};
    for (double r : quadrature::sign_changes(g, lo, hi, root_resolution))
        if (r > cuts.back()) cuts.push_back(r);
    if (cuts.back() < hi) cuts.push_back(hi);

    const auto transformed = [&](double t) { return apply(transform, g(t)); };
    double sum = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k)
        sum += quadrature::adaptive(transformed, cuts[k], cuts[k + 1], rel_tol);
    return sum;
}

double integrate_piecewise(const PiecewiseFunction& f, double lo, double hi, Transform transform, double rel_tol) {
    const double T = f.domain_end();
    if (!(lo >= 0.0 && lo <= hi && hi <= T)) {
        std::ostringstream msg;
        msg << "integration range [" << lo << ", " << hi << "] not inside [0, " << T << "]";
        throw DomainError(msg.str());
    }
    double sum = 0.0;
    for (std::size_t k = 0; k < f.segment_count(); ++k) {
        const double a = std::max(lo, f.segment_begin(k));
        const double b = std::min(hi, f.segment_end(k));
        if (!(b > a)) continue;
        const Segment& seg = f.segment(k);
        sum += integrate_smooth([&seg](double t) { return eval_checked(seg, t); }, a, b, transform, rel_tol,
                                1e-13 * T);
    }
    return sum;
}

double integrate_periodic(const PiecewiseFunction& f, double lo, double hi, Transform transform, double rel_tol) {
    if (!(hi > lo)) return 0.0;
    const double T = f.domain_end();
    double sum = 0.0;
    for (double k = std::floor(lo / T); k * T < hi; k += 1.0) {
        const double offset = k * T;
        const double a = std::clamp(lo - offset, 0.0, T);
        const double b = std::clamp(hi - offset, 0.0, T);
        if (b > a) sum += integrate_piecewise(f, a, b, transform, rel_tol);
    }
    return sum;
}

}  // namespace impulse_floquet
