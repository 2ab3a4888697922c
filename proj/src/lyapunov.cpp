#include "impulse_floquet/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "impulse_floquet/errors.hpp"
#include "impulse_floquet/quadrature.hpp"

namespace impulse_floquet {

RescaledSolution::RescaledSolution(const ImpulsiveSystem& system, StateTrajectory trajectory)
    : trajectory_(std::move(trajectory)) {
    const double end = std::nextafter(trajectory_.t_end(), std::numeric_limits<double>::infinity());
    events_ = impulse_floquet::impulse_events(system.schedule(), trajectory_.t_begin(), end);
}

double RescaledSolution::x(double t, Side side) const { return trajectory_.at(t, side)[0]; }
double RescaledSolution::u(double t, Side side) const { return trajectory_.at(t, side)[1]; }
double RescaledSolution::z(double t, Side side) const { return x(t, side) / scale(t, side); }
double RescaledSolution::v(double t, Side side) const { return u(t, side) / scale(t, side); }

RescaledSolution rescale(const ImpulsiveSystem& system, StateTrajectory trajectory) {
    return RescaledSolution(system, std::move(trajectory));
}

namespace {

int grid_size(double length, double period, int per_period, int minimum) {
    const double n = std::ceil(per_period * length / period);
    return std::max(minimum, static_cast<int>(std::min(n, 1e8)));
}

/// Sample times on [lo, hi]: a uniform grid merged with the arc boundaries.
std::vector<double> sample_times(const StateTrajectory& traj, double lo, double hi, int grid_points) {
    std::vector<double> ts;
    ts.reserve(static_cast<std::size_t>(grid_points) + traj.arcs().size() + 1);
    for (int k = 0; k <= grid_points; ++k) ts.push_back(k == grid_points ? hi : lo + (hi - lo) * k / grid_points);
    for (const auto& arc : traj.arcs())
        if (arc.lo > lo && arc.lo < hi) ts.push_back(arc.lo);
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    return ts;
}

std::vector<double> grid_zeros(const std::function<double(double)>& f, const std::vector<double>& ts,
                               double resolution, std::size_t max_count) {
    std::vector<double> roots;
    double prev = f(ts[0]);
    if (prev == 0.0) roots.push_back(ts[0]);
    for (std::size_t k = 1; k < ts.size() && roots.size() < max_count; ++k) {
        const double cur = f(ts[k]);
        if (cur == 0.0) {
            roots.push_back(ts[k]);
        } else if (prev != 0.0 && (prev < 0.0) != (cur < 0.0)) {
            roots.push_back(quadrature::bisect(f, ts[k - 1], ts[k], resolution));
        }
        prev = cur;
    }
    return roots;
}

bool near_impulse(const RescaledSolution& s, double t, double resolution) {
    return std::any_of(s.impulse_events().begin(), s.impulse_events().end(),
                       [&](const ImpulseEvent& e) { return std::abs(e.time - t) <= 4.0 * resolution; });
}

}  // namespace

std::vector<double> zeros_of(const RescaledSolution& solution, double lo, double hi, int grid_points,
                             double resolution) {
    const auto ts = sample_times(solution.trajectory(), lo, hi, grid_points);
    return grid_zeros([&solution](double t) { return solution.z(t); }, ts, resolution,
                      std::numeric_limits<std::size_t>::max());
}

std::optional<ZeroPair> find_zero_pair(const ImpulsiveSystem& system, const State& initial, double window_lo,
                                       double window_hi, const ZeroSearchOptions& options) {
    if (!(initial.t <= window_lo) || !(window_lo < window_hi))
        throw DomainError("find_zero_pair: require initial.t <= window_lo < window_hi");
    const double T = system.period();
    auto solution = std::make_shared<const RescaledSolution>(
        system, integrate_state(system, initial, window_hi, options.integration));
    const double resolution = options.resolution * T;
    const int n = grid_size(window_hi - window_lo, T, options.points_per_period, 16);
    const auto ts = sample_times(solution->trajectory(), window_lo, window_hi, n);
    const auto roots = grid_zeros([&solution](double t) { return solution->z(t); }, ts, resolution, 2);
    if (roots.size() < 2) return std::nullopt;
    ZeroPair pair;
    pair.t1 = roots[0];
    pair.t2 = roots[1];
    pair.t1_at_impulse = near_impulse(*solution, pair.t1, resolution);
    pair.t2_at_impulse = near_impulse(*solution, pair.t2, resolution);
    pair.solution = std::move(solution);
    return pair;
}

LyapunovProduct::LyapunovProduct(const ImpulsiveSystem& system, double t1, double t2, double rel_tol)
    : t1_(t1), t2_(t2), period_(system.period()) {
    if (!(t1 < t2)) throw DomainError("lyapunov product: require t1 < t2");
    double exponent_at = 0.0;
    const auto pieces = system.pieces(t1, t2);
    for (const auto& p : pieces) {
        std::optional<Polynomial> anti;
        if (const Polynomial* poly = p.a->polynomial()) anti = poly->antiderivative();
        parts_.push_back({p.lo, p.hi, p.offset, p.a, std::move(anti), exponent_at});
        const Part& part = parts_.back();
        const Segment* b = p.b;
        weighted_b_ += quadrature::adaptive(
            [&](double t) {
                return eval_checked(*b, t - part.offset) * std::exp(-2.0 * (exponent(t)));
            },
            p.lo, p.hi, rel_tol);
        exponent_at = exponent(p.hi);
    }
    second_ = integrate_periodic(system.c(), t1, t2, Transform::positive_part, rel_tol) +
              positive_part_impulse_sum(system.schedule(), t1, t2);
}

const LyapunovProduct::Part& LyapunovProduct::part_at(double t) const {
    auto it = std::lower_bound(parts_.begin(), parts_.end(), t, [](const Part& p, double v) { return p.hi < v; });
    if (it == parts_.end()) return parts_.back();
    return *it;
}

double LyapunovProduct::exponent(double t) const {
    const Part& p = part_at(t);
    const double tc = std::clamp(t, p.lo, p.hi);
    if (p.antiderivative) {
        const Polynomial& anti = *p.antiderivative;
        return p.exponent_at_lo + anti(tc - p.offset) - anti(p.lo - p.offset);
    }
    const Segment* a = p.a;
    const double off = p.offset;
    return p.exponent_at_lo +
           quadrature::adaptive([a, off](double s) { return eval_checked(*a, s - off); }, p.lo, tc, 1e-13);
}

double LyapunovProduct::first_factor(double t0) const { return std::exp(2.0 * exponent(t0)) * weighted_b_; }

LyapunovProduct::Maximum LyapunovProduct::maximize(int grid_points) const {
    std::size_t best = 0;
    double best_v = -std::numeric_limits<double>::infinity();
    std::vector<double> ts(static_cast<std::size_t>(grid_points) + 1);
    for (int k = 0; k <= grid_points; ++k) ts[k] = k == grid_points ? t2_ : t1_ + (t2_ - t1_) * k / grid_points;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        const double val = exponent(ts[k]);
        if (val > best_v) {
            best_v = val;
            best = k;
        }
    }
    const double lo = ts[best == 0 ? 0 : best - 1];
    const double hi = ts[std::min(best + 1, ts.size() - 1)];
    double t0 = quadrature::golden_maximize([this](double t) { return exponent(t); }, lo, hi,
                                            1e-13 * std::max(1.0, period_));
    if (exponent(t0) < best_v) t0 = ts[best];
    return {t0, (*this)(t0)};
}

double lyapunov_lhs(const ImpulsiveSystem& system, double t1, double t2, double t0) {
    if (!(t1 <= t0 && t0 <= t2)) throw DomainError("lyapunov_lhs: require t1 <= t0 <= t2");
    return LyapunovProduct(system, t1, t2)(t0);
}

LyapunovWitness lyapunov_verify(const ImpulsiveSystem& system, const ZeroPair& pair, const LyapunovOptions& options) {
    if (!pair.solution) throw DomainError("lyapunov_verify: zero pair carries no solution");
    if (!(pair.t2 - pair.t1 > 1e-10 * system.period()))
        throw DomainError("lyapunov_verify: degenerate zero pair");
    const RescaledSolution& s = *pair.solution;
    const auto abs_z = [&s](double t) { return std::abs(s.z(t)); };
    const int n = options.grid_points;
    std::size_t best = 1;
    double best_v = -1.0;
    std::vector<double> ts(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k) ts[k] = pair.t1 + (pair.t2 - pair.t1) * k / n;
    for (std::size_t k = 1; k < ts.size() - 1; ++k) {
        const double v = abs_z(ts[k]);
        if (v > best_v) {
            best_v = v;
            best = k;
        }
    }
    double t0 = quadrature::golden_maximize(abs_z, ts[best - 1], ts[best + 1], 1e-13 * system.period());
    if (abs_z(t0) < best_v) t0 = ts[best];

    const LyapunovProduct product(system, pair.t1, pair.t2);
    LyapunovWitness w;
    w.t0 = t0;
    w.lhs = product(t0);
    const auto sup = product.maximize(options.grid_points);
    w.sup_t0 = sup.t0;
    w.sup_lhs = std::max(sup.value, w.lhs);
    w.holds = w.lhs >= 4.0 - options.tolerance;
    return w;
}

std::string to_string(DisconjugacyVerdict verdict) {
    return verdict == DisconjugacyVerdict::disconjugate_certified ? "disconjugate-certified" : "inconclusive";
}

std::string to_string(OracleVerdict verdict) {
    return verdict == OracleVerdict::disconjugate ? "disconjugate" : "not-disconjugate";
}

DisconjugacyResult disconjugacy_test(const ImpulsiveSystem& system, double t1, double t2,
                                     const DisconjugacyOptions& options) {
    const LyapunovProduct product(system, t1, t2);
    const auto m = product.maximize(options.grid_points);
    DisconjugacyResult r;
    r.sup = m.value;
    r.t0_at_sup = m.t0;
    r.verdict = m.value < 4.0 - options.margin ? DisconjugacyVerdict::disconjugate_certified
                                               : DisconjugacyVerdict::inconclusive;
    return r;
}

OracleResult disconjugacy_oracle(const ImpulsiveSystem& system, double t1, double t2, const OracleOptions& options) {
    if (!(t1 < t2)) throw DomainError("disconjugacy_oracle: require t1 < t2");
    const double T = system.period();
    const double resolution = 1e-12 * T;
    const int n = grid_size(t2 - t1, T, options.points_per_period, options.min_grid_points);
    OracleResult out;

    // The solution vanishing at t1 has a second zero in (t1, t2] exactly when
    // some solution has two zeros, so this check alone is decisive; the
    // direction scan below is an independent cross-check.
    const RescaledSolution first(system, integrate_state(system, State{t1, 0.0, 1.0, Side::right}, t2,
                                                         options.integration));
    const auto roots = grid_zeros([&first](double t) { return first.z(t); },
                                  sample_times(first.trajectory(), t1, t2, n), resolution, 2);
    if (roots.size() == 2) {
        out.verdict = OracleVerdict::not_disconjugate;
        out.zeros = std::make_pair(roots[0], roots[1]);
        return out;
    }

    const auto basis = integrate_fundamental(system, t1, t2, options.integration);
    std::vector<double> ts;
    for (int k = 0; k <= n; ++k) ts.push_back(k == n ? t2 : t1 + (t2 - t1) * k / n);
    for (const auto& arc : basis.arcs())
        if (arc.lo > t1 && arc.lo < t2) ts.push_back(arc.lo);
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    std::vector<double> z1(ts.size()), z2(ts.size());
    for (std::size_t k = 0; k < ts.size(); ++k) {
        const auto y = basis.at(ts[k], Side::left);
        const double s = basis.alpha_scale(ts[k], Side::left);
        z1[k] = y[0] / s;
        z2[k] = y[2] / s;
    }
    const auto count = [&](double theta) {
        const double c = std::cos(theta), s = std::sin(theta);
        int zeros = 0;
        double prev = c * z1[0] + s * z2[0];
        if (prev == 0.0) ++zeros;
        for (std::size_t k = 1; k < ts.size(); ++k) {
            const double cur = c * z1[k] + s * z2[k];
            if (cur == 0.0) ++zeros;
            else if (prev != 0.0 && (prev < 0.0) != (cur < 0.0)) ++zeros;
            prev = cur;
        }
        return zeros;
    };
    const auto flag = [&](double theta) {
        out.verdict = OracleVerdict::not_disconjugate;
        out.theta = theta;
        const double c = std::cos(theta), s = std::sin(theta);
        const auto f = [&](double t) {
            const auto y = basis.at(t, Side::left);
            return (c * y[0] + s * y[2]) / basis.alpha_scale(t, Side::left);
        };
        const auto roots = grid_zeros(f, ts, resolution, 2);
        if (roots.size() == 2) out.zeros = std::make_pair(roots[0], roots[1]);
    };

    const int m = options.theta_points;
    std::vector<int> counts(static_cast<std::size_t>(m) + 1);
    for (int k = 0; k <= m; ++k) {
        const double theta = std::numbers::pi * k / m;
        counts[k] = count(theta);
        if (counts[k] >= 2) {
            flag(theta);
            return out;
        }
    }
    // Narrow windows of two-zero directions sit where the zero count changes.
    for (int k = 0; k < m; ++k) {
        if (counts[k] == counts[k + 1]) continue;
        double lo = std::numbers::pi * k / m, hi = std::numbers::pi * (k + 1) / m;
        const int c_lo = counts[k];
        for (int it = 0; it < 40; ++it) {
            const double mid = 0.5 * (lo + hi);
            const int c = count(mid);
            if (c >= 2) {
                flag(mid);
                return out;
            }
            (c == c_lo ? lo : hi) = mid;
        }
    }
    return out;
}

}  // namespace impulse_floquet
