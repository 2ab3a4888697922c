#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "impulse_floquet/propagation.hpp"

namespace impulse_floquet {

/// Continuous rescaling z = x / (alpha_1 ... alpha_i), v = u / (alpha_1 ... alpha_i)
/// of a trajectory, where the product runs over the jumps applied since the
/// start of the trajectory.
class RescaledSolution {
public:
    RescaledSolution(const ImpulsiveSystem& system, StateTrajectory trajectory);

    double t_begin() const { return trajectory_.t_begin(); }
    double t_end() const { return trajectory_.t_end(); }
    const StateTrajectory& trajectory() const { return trajectory_; }
    /// Impulse occurrences in [t_begin, t_end] that act on the trajectory.
    const std::vector<ImpulseEvent>& impulse_events() const { return events_; }

    double x(double t, Side side = Side::left) const;
    double u(double t, Side side = Side::left) const;
    double z(double t, Side side = Side::left) const;
    double v(double t, Side side = Side::left) const;
    double scale(double t, Side side = Side::left) const { return trajectory_.alpha_scale(t, side); }

private:
    StateTrajectory trajectory_;
    std::vector<ImpulseEvent> events_;
};

RescaledSolution rescale(const ImpulsiveSystem& system, StateTrajectory trajectory);

struct ZeroPair {
    double t1 = 0.0;
    double t2 = 0.0;
    bool t1_at_impulse = false;
    bool t2_at_impulse = false;
    std::shared_ptr<const RescaledSolution> solution;
};

struct ZeroSearchOptions {
    int points_per_period = 512;
    double resolution = 1e-12;  // bisection width, relative to the period
    Tolerances integration{1e-12, 1e-11};
};

/// First two consecutive zeros of z in [window_lo, window_hi] for the solution
/// through `initial`. Requires initial.t <= window_lo.
std::optional<ZeroPair> find_zero_pair(const ImpulsiveSystem& system, const State& initial, double window_lo,
                                       double window_hi, const ZeroSearchOptions& options = {});

/// Zeros of z in [lo, hi] from grid bracketing and bisection, in increasing order.
std::vector<double> zeros_of(const RescaledSolution& solution, double lo, double hi, int grid_points,
                             double resolution);

/// Evaluator of the two-factor product
///   [int_{t1}^{t2} b exp(-2 int_{t0}^t a)] [int_{t1}^{t2} c+ + sum_{t1 <= tau < t2} (beta/alpha)+]
/// as a function of t0. The t0-independent parts are computed once.
class LyapunovProduct {
public:
    LyapunovProduct(const ImpulsiveSystem& system, double t1, double t2, double rel_tol = 1e-11);

    double t1() const { return t1_; }
    double t2() const { return t2_; }
    /// int_{t1}^{t} a
    double exponent(double t) const;
    /// int_{t1}^{t2} b exp(-2 int_{t0}^t a) as a function of t0.
    double first_factor(double t0) const;
    double second_factor() const { return second_; }
    double operator()(double t0) const { return first_factor(t0) * second_; }

    struct Maximum {
        double t0;
        double value;
    };
    /// Supremum over t0 in [t1, t2]: grid evaluation then golden-section refinement.
    Maximum maximize(int grid_points = 256) const;

private:
    struct Part {
        double lo;
        double hi;
        double offset;
        const Segment* a;
        std::optional<Polynomial> antiderivative;
        double exponent_at_lo;
    };
    const Part& part_at(double t) const;

    double t1_;
    double t2_;
    double period_;
    std::vector<Part> parts_;
    double weighted_b_ = 0.0;  // int b exp(-2 exponent)
    double second_ = 0.0;
};

/// Requires t1 <= t0 <= t2 (DomainError otherwise).
double lyapunov_lhs(const ImpulsiveSystem& system, double t1, double t2, double t0);

struct LyapunovWitness {
    double t0 = 0.0;        // argmax of |z| on (t1, t2)
    double lhs = 0.0;       // product at t0
    double sup_t0 = 0.0;    // global maximizer of the product over t0
    double sup_lhs = 0.0;
    bool holds = false;     // lhs >= 4 - tolerance
};

struct LyapunovOptions {
    int grid_points = 256;
    double tolerance = 1e-6;
};

/// Throws DomainError for a degenerate pair or one without a solution.
LyapunovWitness lyapunov_verify(const ImpulsiveSystem& system, const ZeroPair& pair,
                                const LyapunovOptions& options = {});

enum class DisconjugacyVerdict { disconjugate_certified, inconclusive };
enum class OracleVerdict { disconjugate, not_disconjugate };
std::string to_string(DisconjugacyVerdict verdict);
std::string to_string(OracleVerdict verdict);

struct DisconjugacyResult {
    DisconjugacyVerdict verdict = DisconjugacyVerdict::inconclusive;
    double sup = 0.0;
    double t0_at_sup = 0.0;
};

struct DisconjugacyOptions {
    int grid_points = 256;
    double margin = 1e-9;
};

DisconjugacyResult disconjugacy_test(const ImpulsiveSystem& system, double t1, double t2,
                                     const DisconjugacyOptions& options = {});

struct OracleResult {
    OracleVerdict verdict = OracleVerdict::disconjugate;
    /// Initial direction (cos theta, sin theta) at t1 of a solution with two zeros,
    /// and those zeros; theta is NaN for the solution with x(t1) = 0, u(t1) = 1.
    std::optional<double> theta;
    std::optional<std::pair<double, double>> zeros;
};

struct OracleOptions {
    int theta_points = 180;
    int points_per_period = 512;
    int min_grid_points = 256;
    Tolerances integration{1e-12, 1e-11};
};

/// Brute-force search for a nontrivial solution with two zeros on [t1, t2].
OracleResult disconjugacy_oracle(const ImpulsiveSystem& system, double t1, double t2,
                                 const OracleOptions& options = {});

}  // namespace impulse_floquet
