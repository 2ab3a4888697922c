#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "impulse_floquet/mat2.hpp"
#include "impulse_floquet/piecewise.hpp"

namespace impulse_floquet {

/// Jump at time tau: x -> alpha x, u -> alpha u - beta x.
struct Impulse {
    double tau = 0.0;
    double alpha = 1.0;
    double beta = 0.0;

    friend bool operator==(const Impulse&, const Impulse&) = default;
};

/// Impulse data over one period, implicitly extended by tau_{i+r} = tau_i + T.
class ImpulseSchedule {
public:
    ImpulseSchedule(double period, std::vector<Impulse> impulses = {});

    double period() const { return period_; }
    std::span<const Impulse> impulses() const { return impulses_; }
    std::size_t count() const { return impulses_.size(); }
    const Impulse& operator[](std::size_t i) const { return impulses_[i]; }

    /// True when every impulse is the identity jump (alpha = 1, beta = 0).
    bool is_trivial() const;
    double alpha_product() const;
    double alpha_product_squared() const;
    /// Sum of beta/alpha over one period.
    double ratio_sum() const;

private:
    double period_;
    std::vector<Impulse> impulses_;
};

/// Occurrence of impulse `index` at absolute time `time` of the periodic extension.
struct ImpulseEvent {
    double time;
    std::size_t index;
};

/// Impulse occurrences with lo <= time < hi on the periodic extension, in time order.
std::vector<ImpulseEvent> impulse_events(const ImpulseSchedule& schedule, double lo, double hi);

/// Sum of (beta/alpha)^+ over occurrences with lo <= tau < hi.
double positive_part_impulse_sum(const ImpulseSchedule& schedule, double lo, double hi);

/// Matrix M with (x, u)(tau_i+) = M (x, u)(tau_i-). `i` is zero-based; throws std::out_of_range.
Mat2 jump_matrix(const ImpulseSchedule& schedule, std::size_t i);

/// One smooth interval [lo, hi] of the periodic extension. Coefficients are
/// evaluated at phase t - offset with the segments valid on this interval.
struct Piece {
    double lo;
    double hi;
    double offset;
    const Segment* a;
    const Segment* b;
    const Segment* c;
    std::optional<std::size_t> impulse_at_lo;  // impulse occurring exactly at lo
    std::optional<std::size_t> impulse_at_hi;  // impulse occurring exactly at hi
};

/// x' = a x + b u, u' = -c x - a u between impulses, with the impulse jumps of
/// the schedule. Construction injects every impulse time into the breakpoint
/// lists of all three coefficients; other invariants are checked by validate_system.
class ImpulsiveSystem {
public:
    ImpulsiveSystem(PiecewiseFunction a, PiecewiseFunction b, PiecewiseFunction c, ImpulseSchedule schedule);

    const PiecewiseFunction& a() const { return a_; }
    const PiecewiseFunction& b() const { return b_; }
    const PiecewiseFunction& c() const { return c_; }
    const ImpulseSchedule& schedule() const { return schedule_; }
    double period() const { return schedule_.period(); }

    /// Union of all coefficient breakpoints (which include the impulse times), sorted.
    std::span<const double> cuts() const { return cuts_; }

    /// Smooth intervals covering [lo, hi] on the periodic extension.
    std::vector<Piece> pieces(double lo, double hi) const;

private:
    PiecewiseFunction a_;
    PiecewiseFunction b_;
    PiecewiseFunction c_;
    ImpulseSchedule schedule_;
    std::vector<double> cuts_;
    std::vector<std::optional<std::size_t>> cut_impulse_;
};

enum class ViolationKind {
    nonpositive_period,
    period_mismatch,
    nonfinite_parameter,
    impulse_at_endpoint,
    impulse_outside_period,
    impulse_order,
    zero_multiplier,
    breakpoint_mismatch,
};

struct Violation {
    ViolationKind kind;
    std::optional<std::size_t> impulse;  // zero-based index when the violation concerns an impulse
    std::string message;
};

/// Every violated standing assumption; empty for a valid system.
std::vector<Violation> validate_system(const ImpulsiveSystem& system);

std::string to_string(ViolationKind kind);

}  // namespace impulse_floquet
