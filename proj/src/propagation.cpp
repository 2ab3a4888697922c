#include "impulse_floquet/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "impulse_floquet/errors.hpp"

namespace impulse_floquet {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

struct Coefficients {
    double a, b, c;
};

template <std::size_t N>
using Vec = std::array<double, N>;

template <std::size_t N>
Vec<N> rhs(const Coefficients& k, const Vec<N>& y) {
    Vec<N> dy;
    for (std::size_t j = 0; j < N; j += 2) {
        dy[j] = k.a * y[j] + k.b * y[j + 1];
        dy[j + 1] = -k.c * y[j] - k.a * y[j + 1];
    }
    return dy;
}

template <std::size_t N>
void apply_jump(const Impulse& imp, Vec<N>& y) {
    for (std::size_t j = 0; j < N; j += 2) {
        const double x = y[j];
        const double u = y[j + 1];
        y[j] = imp.alpha * x;
        y[j + 1] = imp.alpha * u - imp.beta * x;
    }
}

template <std::size_t N>
bool all_finite(const Vec<N>& y) {
    return std::all_of(y.begin(), y.end(), [](double v) { return std::isfinite(v); });
}

template <std::size_t N>
double max_abs(const Vec<N>& y) {
    double m = 0.0;
    for (double v : y) m = std::max(m, std::abs(v));
    return m;
}

[[noreturn]] void blow_up(double t) {
    std::ostringstream msg;
    msg << "integration failure: state not finite after t = " << t;
    throw IntegrationError(msg.str(), t);
}

}  // namespace

template <std::size_t N>
std::size_t DenseTrajectory<N>::arc_index(double t, Side side) const {
    if (side == Side::left) {
        auto it = std::lower_bound(arcs_.begin(), arcs_.end(), t, [](const Arc& arc, double v) { return arc.hi < v; });
        if (it == arcs_.end()) return arcs_.size() - 1;
        return static_cast<std::size_t>(it - arcs_.begin());
    }
    auto it = std::upper_bound(arcs_.begin(), arcs_.end(), t, [](double v, const Arc& arc) { return v < arc.lo; });
    if (it == arcs_.begin()) return 0;
    return static_cast<std::size_t>(it - arcs_.begin()) - 1;
}

template <std::size_t N>
typename DenseTrajectory<N>::Vector DenseTrajectory<N>::eval_arc(std::size_t index, double t) const {
    const Arc& arc = arcs_[index];
    if (t <= arc.lo) return arc.start;
    if (t >= arc.hi) return arc.end;
    const auto first = steps_.begin() + static_cast<std::ptrdiff_t>(arc.first_step);
    const auto last = first + static_cast<std::ptrdiff_t>(arc.step_count);
    auto it = std::upper_bound(first, last, t, [](double v, const Step& s) { return v < s.t0; });
    if (it != first) --it;
    const Step& s = *it;
    const double theta = (t - s.t0) / s.h;
    const double theta1 = 1.0 - theta;
    Vector y;
    for (std::size_t i = 0; i < N; ++i)
        y[i] = s.rc[0][i] + theta * (s.rc[1][i] + theta1 * (s.rc[2][i] + theta * (s.rc[3][i] + theta1 * s.rc[4][i])));
    return y;
}

template <std::size_t N>
typename DenseTrajectory<N>::Vector DenseTrajectory<N>::at(double t, Side side) const {
    if (arcs_.empty() || (side == Side::left && t <= t_begin_)) return initial_;
    return eval_arc(arc_index(t, side), t);
}

template <std::size_t N>
double DenseTrajectory<N>::alpha_scale(double t, Side side) const {
    if (arcs_.empty() || (side == Side::left && t <= t_begin_)) return initial_scale_;
    return arcs_[arc_index(t, side)].alpha_scale;
}

template <std::size_t N>
DenseTrajectory<N> integrate(const ImpulsiveSystem& system, double t_from, const std::array<double, N>& initial,
                             Side from_side, double t_to, const Tolerances& tol) {
    DenseTrajectory<N> traj;
    using Arc = typename DenseTrajectory<N>::Arc;
    using Step = typename DenseTrajectory<N>::Step;
    traj.t_begin_ = t_from;
    traj.t_end_ = t_to;
    traj.initial_ = initial;

    Vec<N> y = initial;
    double scale = 1.0;
    const auto pieces = system.pieces(t_from, t_to);
    const auto& schedule = system.schedule();
    const double span = std::max(t_to - t_from, 1e-300);
    double h = 0.0;

    for (std::size_t p = 0; p < pieces.size(); ++p) {
        const Piece& piece = pieces[p];
        const bool at_start = p == 0;
        if (piece.impulse_at_lo && (!at_start || from_side == Side::left)) {
            const Impulse& imp = schedule[*piece.impulse_at_lo];
            apply_jump(imp, y);
            scale *= imp.alpha;
        }

        const auto coeffs = [&piece](double t) {
            const double phase = t - piece.offset;
            return Coefficients{eval_checked(*piece.a, phase), eval_checked(*piece.b, phase),
                                eval_checked(*piece.c, phase)};
        };
        const auto f = [&](double t, const Vec<N>& v) { return rhs<N>(coeffs(t), v); };

        Arc arc{piece.lo, piece.hi, traj.steps_.size(), 0, y, y, scale};
        double t = piece.lo;
        const double len = piece.hi - piece.lo;
        Vec<N> k1 = f(t, y);
        if (h <= 0.0) {
            const double yn = std::max(max_abs(y), tol.abs);
            const double fn = max_abs(k1);
            h = fn > 0.0 ? 0.01 * yn / fn : len;
            h = std::clamp(h, 1e-6 * span, span);
        }
        std::size_t guard = 0;
        while (t < piece.hi) {
            if (++guard > tol.max_steps) blow_up(t);
            bool last = false;
            if (t + h >= piece.hi || piece.hi - (t + h) < 1e-12 * len) {
                h = piece.hi - t;
                last = true;
            }
            Vec<N> k2, k3, k4, k5, k6, k7, y1, tmp;
            for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * a21 * k1[i];
            k2 = f(t + c2 * h, tmp);
            for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
            k3 = f(t + c3 * h, tmp);
            for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
            k4 = f(t + c4 * h, tmp);
            for (std::size_t i = 0; i < N; ++i)
                tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
            k5 = f(t + c5 * h, tmp);
            for (std::size_t i = 0; i < N; ++i)
                tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
            k6 = f(t + h, tmp);
            for (std::size_t i = 0; i < N; ++i)
                y1[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
            const double t1 = last ? piece.hi : t + h;
            k7 = f(t1, y1);

            double err = 0.0;
            double err_abs = 0.0;
            for (std::size_t i = 0; i < N; ++i) {
                const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
                const double sc = tol.abs + tol.rel * std::max(std::abs(y[i]), std::abs(y1[i]));
                err = std::max(err, std::abs(e) / sc);
                err_abs = std::max(err_abs, std::abs(e));
            }
            if (!std::isfinite(err)) {
                if (!all_finite(y1)) blow_up(t);
                err = 1e10;
            }
            if (err <= 1.0) {
                Step step{t, h, {}};
                for (std::size_t i = 0; i < N; ++i) {
                    const double ydiff = y1[i] - y[i];
                    const double bspl = h * k1[i] - ydiff;
                    step.rc[0][i] = y[i];
                    step.rc[1][i] = ydiff;
                    step.rc[2][i] = bspl;
                    step.rc[3][i] = ydiff - h * k7[i] - bspl;
                    step.rc[4][i] =
                        h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
                }
                traj.steps_.push_back(step);
                traj.error_sum_ += err_abs;
                y = y1;
                k1 = k7;
                t = t1;
                if (!all_finite(y)) blow_up(t);
                const double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
                if (!last) h *= fac;
                else h = std::max(h, std::min(h * fac, span));
            } else {
                h *= std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
                if (h < 1e-14 * std::max(1.0, std::abs(t))) blow_up(t);
            }
        }
        arc.step_count = traj.steps_.size() - arc.first_step;
        arc.end = y;
        traj.arcs_.push_back(arc);
    }
    return traj;
}

template class DenseTrajectory<2>;
template class DenseTrajectory<4>;
template DenseTrajectory<2> integrate<2>(const ImpulsiveSystem&, double, const std::array<double, 2>&, Side, double,
                                         const Tolerances&);
template DenseTrajectory<4> integrate<4>(const ImpulsiveSystem&, double, const std::array<double, 4>&, Side, double,
                                         const Tolerances&);

StateTrajectory integrate_state(const ImpulsiveSystem& system, const State& from, double t_to, const Tolerances& tol) {
    return integrate<2>(system, from.t, {from.x, from.u}, from.side, t_to, tol);
}

MatrixTrajectory integrate_fundamental(const ImpulsiveSystem& system, double t_from, double t_to,
                                       const Tolerances& tol) {
    return integrate<4>(system, t_from, {1.0, 0.0, 0.0, 1.0}, Side::right, t_to, tol);
}

Mat2 to_matrix(const std::array<double, 4>& v) { return Mat2::from_columns({v[0], v[1]}, {v[2], v[3]}); }

namespace {

void require_window(const ImpulsiveSystem& system, double t_from, double t_to) {
    if (!(t_from >= 0.0 && t_from <= t_to && t_to <= system.period())) {
        std::ostringstream msg;
        msg << "interval [" << t_from << ", " << t_to << "] not inside [0, " << system.period() << "]";
        throw DomainError(msg.str());
    }
}

}  // namespace

State propagate_state(const ImpulsiveSystem& system, const State& from, double t_to, const Tolerances& tol) {
    require_window(system, from.t, t_to);
    const auto traj = integrate_state(system, from, t_to, tol);
    if (t_to == from.t) return from;
    const auto y = traj.at(t_to, Side::left);
    return {t_to, y[0], y[1], Side::left};
}

FundamentalMatrix fundamental_matrix(const ImpulsiveSystem& system, double t_from, double t_to,
                                     const Tolerances& tol) {
    require_window(system, t_from, t_to);
    const auto traj = integrate_fundamental(system, t_from, t_to, tol);
    return {to_matrix(traj.at(t_to, Side::left)), t_from, t_to};
}

Multipliers floquet_multipliers(double trace_a, double b) {
    const double disc = trace_a * trace_a - 4.0 * b;
    if (disc < 0.0) {
        const double re = 0.5 * trace_a;
        const double im = 0.5 * std::sqrt(-disc);
        return {std::complex<double>(re, im), std::complex<double>(re, -im)};
    }
    const double sign = trace_a < 0.0 ? -1.0 : 1.0;
    const double big = 0.5 * (trace_a + sign * std::sqrt(disc));
    if (big == 0.0) return {std::complex<double>(0.0), std::complex<double>(0.0)};
    return {std::complex<double>(big), std::complex<double>(b / big)};
}

MonodromyResult monodromy_from_matrix(const Mat2& x_t, double period, double b) {
    MonodromyResult r;
    r.monodromy = {x_t, 0.0, period};
    r.trace_a = x_t.trace();
    r.b = b;
    r.det = x_t.det();
    r.multipliers = floquet_multipliers(r.trace_a, r.b);
    return r;
}

MonodromyResult monodromy(const ImpulsiveSystem& system, const Tolerances& tol) {
    const double T = system.period();
    const auto traj = integrate_fundamental(system, 0.0, T, tol);
    MonodromyResult r = monodromy_from_matrix(to_matrix(traj.at(T, Side::left)), T,
                                              system.schedule().alpha_product_squared());
    r.error_estimate = traj.local_error_sum() * std::max(1.0, r.monodromy.matrix.spectral_norm());
    r.tolerances = tol;
    return r;
}

}  // namespace impulse_floquet
