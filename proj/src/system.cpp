#include "impulse_floquet/system.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace impulse_floquet {

ImpulseSchedule::ImpulseSchedule(double period, std::vector<Impulse> impulses)
    : period_(period), impulses_(std::move(impulses)) {}

bool ImpulseSchedule::is_trivial() const {
    return std::all_of(impulses_.begin(), impulses_.end(),
                       [](const Impulse& imp) { return imp.alpha == 1.0 && imp.beta == 0.0; });
}

double ImpulseSchedule::alpha_product() const {
    double p = 1.0;
    for (const auto& imp : impulses_) p *= imp.alpha;
    return p;
}

double ImpulseSchedule::alpha_product_squared() const {
    const double p = alpha_product();
    return p * p;
}

double ImpulseSchedule::ratio_sum() const {
    double s = 0.0;
    for (const auto& imp : impulses_) s += imp.beta / imp.alpha;
    return s;
}

std::vector<ImpulseEvent> impulse_events(const ImpulseSchedule& schedule, double lo, double hi) {
    std::vector<ImpulseEvent> events;
    if (!(hi > lo) || schedule.count() == 0) return events;
    const double T = schedule.period();
    for (double k = std::floor(lo / T) - 1.0; k * T < hi; k += 1.0) {
        for (std::size_t i = 0; i < schedule.count(); ++i) {
            const double t = schedule[i].tau + k * T;
            if (t >= lo && t < hi) events.push_back({t, i});
        }
    }
    std::sort(events.begin(), events.end(), [](const auto& p, const auto& q) { return p.time < q.time; });
    return events;
}

double positive_part_impulse_sum(const ImpulseSchedule& schedule, double lo, double hi) {
    double sum = 0.0;
    for (const auto& ev : impulse_events(schedule, lo, hi)) {
        const Impulse& imp = schedule[ev.index];
        sum += std::max(imp.beta / imp.alpha, 0.0);
    }
    return sum;
}

Mat2 jump_matrix(const ImpulseSchedule& schedule, std::size_t i) {
    if (i >= schedule.count()) throw std::out_of_range("impulse index out of range");
    const Impulse& imp = schedule[i];
    return {imp.alpha, 0.0, -imp.beta, imp.alpha};
}

namespace {

std::vector<double> impulse_times(const ImpulseSchedule& schedule) {
    std::vector<double> times;
    for (const auto& imp : schedule.impulses()) times.push_back(imp.tau);
    return times;
}

}  // namespace

ImpulsiveSystem::ImpulsiveSystem(PiecewiseFunction a, PiecewiseFunction b, PiecewiseFunction c,
                                 ImpulseSchedule schedule)
    : a_(a.with_breakpoints(impulse_times(schedule))),
      b_(b.with_breakpoints(impulse_times(schedule))),
      c_(c.with_breakpoints(impulse_times(schedule))),
      schedule_(std::move(schedule)) {
    for (const auto* f : {&a_, &b_, &c_})
        for (double t : f->breakpoints())
            if (t < schedule_.period()) cuts_.push_back(t);
    std::sort(cuts_.begin(), cuts_.end());
    cuts_.erase(std::unique(cuts_.begin(), cuts_.end()), cuts_.end());
    cut_impulse_.resize(cuts_.size());
    for (std::size_t i = 0; i < schedule_.count(); ++i) {
        auto it = std::lower_bound(cuts_.begin(), cuts_.end(), schedule_[i].tau);
        if (it != cuts_.end() && *it == schedule_[i].tau) cut_impulse_[it - cuts_.begin()] = i;
    }
}

std::vector<Piece> ImpulsiveSystem::pieces(double lo, double hi) const {
    std::vector<Piece> out;
    if (!(hi > lo)) return out;
    const double T = period();
    for (double k = std::floor(lo / T); k * T < hi; k += 1.0) {
        const double offset = k * T;
        double start = 0.0;
        for (std::size_t j = 0; j <= cuts_.size(); ++j) {
            const double end = j < cuts_.size() ? cuts_[j] : T;
            const double plo = std::max(lo, start + offset);
            const double phi = std::min(hi, end + offset);
            if (phi > plo) {
                const double mid = 0.5 * (start + end);
                Piece piece{plo, phi, offset, &a_.segment_at(mid), &b_.segment_at(mid), &c_.segment_at(mid), {}, {}};
                if (j > 0 && plo == start + offset) piece.impulse_at_lo = cut_impulse_[j - 1];
                if (j < cuts_.size() && phi == end + offset) piece.impulse_at_hi = cut_impulse_[j];
                out.push_back(piece);
            }
            start = end;
        }
    }
    return out;
}

std::string to_string(ViolationKind kind) {
    switch (kind) {
        case ViolationKind::nonpositive_period: return "non-positive period";
        case ViolationKind::period_mismatch: return "coefficient period mismatch";
        case ViolationKind::nonfinite_parameter: return "non-finite impulse parameter";
        case ViolationKind::impulse_at_endpoint: return "impulse at interval endpoint";
        case ViolationKind::impulse_outside_period: return "impulse outside period";
        case ViolationKind::impulse_order: return "impulse times not strictly increasing";
        case ViolationKind::zero_multiplier: return "zero impulse multiplier";
        case ViolationKind::breakpoint_mismatch: return "impulse time missing from coefficient breakpoints";
    }
    return "unknown";
}

std::vector<Violation> validate_system(const ImpulsiveSystem& system) {
    std::vector<Violation> out;
    const auto add = [&out](ViolationKind kind, std::optional<std::size_t> index, const std::string& detail) {
        std::ostringstream msg;
        if (index) msg << "impulse " << *index << ": ";
        msg << to_string(kind);
        if (!detail.empty()) msg << " (" << detail << ")";
        out.push_back({kind, index, msg.str()});
    };

    const double T = system.period();
    if (!(T > 0.0) || !std::isfinite(T)) add(ViolationKind::nonpositive_period, std::nullopt, "");
    const std::pair<const char*, const PiecewiseFunction*> coeffs[] = {
        {"a", &system.a()}, {"b", &system.b()}, {"c", &system.c()}};
    for (const auto& [name, f] : coeffs)
        if (f->domain_end() != T) add(ViolationKind::period_mismatch, std::nullopt, std::string("coefficient ") + name);

    const auto& sched = system.schedule();
    for (std::size_t i = 0; i < sched.count(); ++i) {
        const Impulse& imp = sched[i];
        if (!std::isfinite(imp.tau) || !std::isfinite(imp.alpha) || !std::isfinite(imp.beta)) {
            add(ViolationKind::nonfinite_parameter, i, "");
            continue;
        }
        std::ostringstream tau;
        tau << "tau = " << imp.tau;
        if (imp.tau == 0.0 || imp.tau == T)
            add(ViolationKind::impulse_at_endpoint, i, tau.str());
        else if (imp.tau < 0.0 || imp.tau > T)
            add(ViolationKind::impulse_outside_period, i, tau.str());
        if (i > 0 && !(imp.tau > sched[i - 1].tau)) add(ViolationKind::impulse_order, i, tau.str());
        if (imp.alpha == 0.0) add(ViolationKind::zero_multiplier, i, "");
        if (imp.tau > 0.0 && imp.tau < T) {
            for (const auto& [name, f] : coeffs) {
                const auto bp = f->breakpoints();
                if (!std::binary_search(bp.begin(), bp.end(), imp.tau))
                    add(ViolationKind::breakpoint_mismatch, i, std::string("coefficient ") + name);
            }
        }
    }
    return out;
}

}  // namespace impulse_floquet
