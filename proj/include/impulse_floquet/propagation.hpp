#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

#include "impulse_floquet/mat2.hpp"
#include "impulse_floquet/system.hpp"

namespace impulse_floquet {

/// Per-component error control of the Runge-Kutta integrator.
struct Tolerances {
    double abs = 1e-10;
    double rel = 1e-9;
    std::size_t max_steps = 2'000'000;
};

/// Solution value (x, u) at time t. At an impulse time `side` says which
/// one-sided limit is carried; elsewhere it is irrelevant.
struct State {
    double t = 0.0;
    double x = 0.0;
    double u = 0.0;
    Side side = Side::right;
};

/// Columns (x1, u1) and (x2, u2) of the solution matrix started from the
/// identity at t_from (right limit) and evaluated at t_to (left limit).
struct FundamentalMatrix {
    Mat2 matrix;
    double t_from = 0.0;
    double t_to = 0.0;
};

/// Dense-output trajectory over [t_begin, t_end] with the impulse jumps
/// applied in between. N = 2 carries a state, N = 4 a fundamental matrix
/// stored as (x1, u1, x2, u2).
template <std::size_t N>
class DenseTrajectory {
public:
    using Vector = std::array<double, N>;

    struct Step {
        double t0;
        double h;
        std::array<Vector, 5> rc;  // continuous-extension coefficients
    };

    /// Smooth stretch between consecutive jump/cut points.
    struct Arc {
        double lo;
        double hi;
        std::size_t first_step;
        std::size_t step_count;
        Vector start;  // value at lo (right limit)
        Vector end;    // value at hi (left limit)
        double alpha_scale;  // product of alphas of the jumps applied before lo
    };

    double t_begin() const { return t_begin_; }
    double t_end() const { return t_end_; }
    const Vector& initial() const { return initial_; }
    const std::vector<Arc>& arcs() const { return arcs_; }
    std::size_t step_count() const { return steps_.size(); }
    /// Sum over accepted steps of the embedded error estimate (max-norm, absolute units).
    double local_error_sum() const { return error_sum_; }

    /// One-sided value at t in [t_begin, t_end]. The left limit at t_begin is the
    /// initial value as given; the right limit at t_end is the left limit.
    Vector at(double t, Side side = Side::left) const;
    /// Running alpha product used by the rescaled solution at (t, side).
    double alpha_scale(double t, Side side = Side::left) const;

    /// Index of the arc supplying the one-sided value at t.
    std::size_t arc_index(double t, Side side) const;
    Vector eval_arc(std::size_t arc, double t) const;

private:
    template <std::size_t M>
    friend DenseTrajectory<M> integrate(const ImpulsiveSystem&, double, const std::array<double, M>&, Side, double,
                                        const Tolerances&);

    double t_begin_ = 0.0;
    double t_end_ = 0.0;
    Vector initial_{};
    double initial_scale_ = 1.0;
    std::vector<Step> steps_;
    std::vector<Arc> arcs_;
    double error_sum_ = 0.0;
};

using StateTrajectory = DenseTrajectory<2>;
using MatrixTrajectory = DenseTrajectory<4>;

/// Integrate from t_from to t_to >= t_from on the periodic extension of the
/// system. The impulse at t_from is applied only when `from_side` is left; an
/// impulse at t_to is not applied. Throws IntegrationError on blow-up.
template <std::size_t N>
DenseTrajectory<N> integrate(const ImpulsiveSystem& system, double t_from, const std::array<double, N>& initial,
                             Side from_side, double t_to, const Tolerances& tol);

StateTrajectory integrate_state(const ImpulsiveSystem& system, const State& from, double t_to,
                                const Tolerances& tol = {});
MatrixTrajectory integrate_fundamental(const ImpulsiveSystem& system, double t_from, double t_to,
                                       const Tolerances& tol = {});

Mat2 to_matrix(const std::array<double, 4>& v);

/// Propagate a state within one period window [0, T]; the result carries side
/// left (the value just before any impulse at t_to).
State propagate_state(const ImpulsiveSystem& system, const State& from, double t_to, const Tolerances& tol = {});

/// Requires 0 <= t_from <= t_to <= T.
FundamentalMatrix fundamental_matrix(const ImpulsiveSystem& system, double t_from, double t_to,
                                     const Tolerances& tol = {});

using Multipliers = std::array<std::complex<double>, 2>;

/// Roots of rho^2 - A rho + B = 0 with B > 0, larger-magnitude root first.
Multipliers floquet_multipliers(double trace_a, double b);

struct MonodromyResult {
    FundamentalMatrix monodromy;
    double trace_a = 0.0;       // x1(T) + u2(T)
    double b = 1.0;             // exact product of alpha_i^2
    double det = 1.0;           // det X(T), integration cross-check
    Multipliers multipliers{};  // roots with B = b
    double error_estimate = 0.0;
    Tolerances tolerances;
};

MonodromyResult monodromy(const ImpulsiveSystem& system, const Tolerances& tol = {});

/// Monodromy data from an already known X(T) (used for hand-built cases).
MonodromyResult monodromy_from_matrix(const Mat2& x_t, double period, double b);

}  // namespace impulse_floquet
