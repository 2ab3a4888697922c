#include "impulse_floquet/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "impulse_floquet/errors.hpp"

namespace impulse_floquet::harness {

using nlohmann::json;

std::string to_string(ConstraintMode mode) {
    switch (mode) {
        case ConstraintMode::unconstrained: return "unconstrained";
        case ConstraintMode::force_main: return "force-main";
        case ConstraintMode::force_guseinov_zafer: return "force-guseinov-zafer";
        case ConstraintMode::force_alpha_product_one: return "force-alpha-product-one";
        case ConstraintMode::impulse_free: return "impulse-free";
        case ConstraintMode::force_krein: return "force-krein";
        case ConstraintMode::force_wang: return "force-wang";
    }
    return "unknown";
}

std::optional<ConstraintMode> parse_mode(const std::string& name) {
    for (auto m : {ConstraintMode::unconstrained, ConstraintMode::force_main, ConstraintMode::force_guseinov_zafer,
                   ConstraintMode::force_alpha_product_one, ConstraintMode::impulse_free, ConstraintMode::force_krein,
                   ConstraintMode::force_wang})
        if (to_string(m) == name) return m;
    return std::nullopt;
}

void validate(const GeneratorSpec& s) {
    const auto require = [](bool ok, const char* what) {
        if (!ok) throw std::invalid_argument(std::string("generator spec: ") + what);
    };
    require(s.segments_min >= 1 && s.segments_max >= s.segments_min, "segment count range");
    require(s.degree >= 0 && s.degree <= 8, "degree in [0, 8]");
    require(s.period_min > 0.0 && s.period_max >= s.period_min, "period range");
    require(s.a_amplitude >= 0.0 && s.c_amplitude >= 0.0 && s.beta_max >= 0.0, "nonnegative amplitudes");
    require(s.b_min > 0.0 && s.b_max >= s.b_min, "b range");
    require(s.impulses_min >= 0 && s.impulses_max >= s.impulses_min, "impulse count range");
    require(s.alpha_min > 0.0 && s.alpha_max >= s.alpha_min, "alpha range");
    require(s.negative_alpha_probability >= 0.0 && s.negative_alpha_probability <= 1.0, "probability");
    require(s.margin >= 0.0 && s.margin < 1.0, "margin in [0, 1)");
    require(s.max_attempts >= 1, "attempt budget");
}

GeneratorSpec offset_spec(const GeneratorSpec& spec, std::uint64_t offset) {
    GeneratorSpec out = spec;
    std::uint64_t z = spec.seed + 0x9E3779B97F4A7C15ull * (offset + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    out.seed = z ^ (z >> 31);
    return out;
}

namespace {

class Draw {
public:
    explicit Draw(std::uint64_t seed) : rng_(seed) {}
    /// Uniform on [0, 1) built from raw engine output so the stream is the same on every platform.
    double unit() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
    double symmetric(double amp) { return amp * (2.0 * unit() - 1.0); }
    int integer(int lo, int hi) { return lo + static_cast<int>(unit() * (hi - lo + 1)); }

private:
    std::mt19937_64 rng_;
};

/// sum_k coeffs[k] ((t - mid) / half)^k as a polynomial in t.
Polynomial local_polynomial(const std::vector<double>& coeffs, double lo, double hi) {
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    const Polynomial s({-mid / half, 1.0 / half});
    Polynomial out({0.0});
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) out = out * s + Polynomial({*it});
    return out;
}

struct Draft {
    double period;
    std::vector<double> breakpoints;
    std::vector<Polynomial> a, b, c;
    std::vector<Impulse> impulses;
};

Draft draft(const GeneratorSpec& spec, Draw& d, bool impulses_allowed, bool constant_b) {
    Draft out;
    out.period = d.uniform(spec.period_min, spec.period_max);
    const int n = d.integer(spec.segments_min, spec.segments_max);
    for (int k = 1; k < n; ++k) out.breakpoints.push_back(out.period * (k + d.symmetric(0.3)) / n);
    std::vector<double> edges{0.0};
    edges.insert(edges.end(), out.breakpoints.begin(), out.breakpoints.end());
    edges.push_back(out.period);
    for (int k = 0; k < n; ++k) {
        const double lo = edges[k], hi = edges[k + 1];
        std::vector<double> ac, cc;
        for (int j = 0; j <= spec.degree; ++j) ac.push_back(d.symmetric(spec.a_amplitude));
        for (int j = 0; j <= spec.degree; ++j) cc.push_back(d.symmetric(spec.c_amplitude) + (j == 0 ? spec.c_offset : 0.0));
        const double span = spec.b_max - spec.b_min;
        const double base = spec.b_min + span * d.unit();
        std::vector<double> bc{base};
        if (!constant_b) {
            // b_min + delta + gamma (s - r)^2 with delta, gamma >= 0 stays above b_min.
            const double delta = 0.5 * span * d.unit(), gamma = 0.25 * span * d.unit(), r = d.symmetric(1.0);
            bc = {spec.b_min + delta + gamma * r * r, -2.0 * gamma * r, gamma};
        }
        out.a.push_back(local_polynomial(ac, lo, hi));
        out.b.push_back(local_polynomial(bc, lo, hi));
        out.c.push_back(local_polynomial(cc, lo, hi));
    }
    if (impulses_allowed) {
        const int r = d.integer(spec.impulses_min, spec.impulses_max);
        for (int i = 0; i < r; ++i) {
            const double sign = d.unit() < spec.negative_alpha_probability ? -1.0 : 1.0;
            out.impulses.push_back({out.period * (i + 0.15 + 0.7 * d.unit()) / r,
                                    sign * d.uniform(spec.alpha_min, spec.alpha_max), d.symmetric(spec.beta_max)});
        }
    }
    return out;
}

void force_alpha_product_one(Draft& dr, Draw& d, const GeneratorSpec& spec) {
    if (dr.impulses.empty()) return;
    double prod = 1.0;
    for (std::size_t i = 0; i + 1 < dr.impulses.size(); ++i) prod *= dr.impulses[i].alpha;
    const double sign = d.unit() < spec.negative_alpha_probability ? -1.0 : 1.0;
    dr.impulses.back().alpha = sign / prod;
}

PiecewiseFunction to_function(double period, const std::vector<double>& bps, const std::vector<Polynomial>& polys,
                              double scale = 1.0) {
    std::vector<Segment> segs;
    for (const auto& p : polys) segs.emplace_back(scale * p);
    return PiecewiseFunction(period, bps, std::move(segs));
}

ImpulsiveSystem build(const Draft& dr, double a_scale = 1.0, double c_scale = 1.0) {
    std::vector<Impulse> imps = dr.impulses;
    for (auto& imp : imps) imp.beta *= c_scale;
    return ImpulsiveSystem(to_function(dr.period, dr.breakpoints, dr.a, a_scale),
                           to_function(dr.period, dr.breakpoints, dr.b),
                           to_function(dr.period, dr.breakpoints, dr.c, c_scale),
                           ImpulseSchedule(dr.period, std::move(imps)));
}

/// Scale a by lambda and (c, beta) by s so that the target criterion holds with the requested margin.
/// s is drawn from the feasible interval with a bias toward the product bound.
std::optional<ImpulsiveSystem> try_force_integral(const GeneratorSpec& spec, Draw& d, ConstraintMode mode) {
    const bool impulses = mode != ConstraintMode::force_wang;
    Draft dr = draft(spec, d, impulses, false);
    force_alpha_product_one(dr, d, spec);
    const auto q = compute_quantities(build(dr));
    if (!q.int_a2_over_b) return std::nullopt;
    const double g = q.int_c + q.ratio_sum;
    const double p = q.int_c_pos + q.ratio_pos_sum;
    if (!(g > 0.0) || !(p > 0.0)) return std::nullopt;
    const double m = spec.margin;
    double lambda = 1.0;
    for (int shrink = 0; shrink < 30; ++shrink, lambda *= 0.5) {
        const double i0 = lambda * lambda * *q.int_a2_over_b;
        const double abs_a = lambda * q.int_abs_a;
        const double lo = (i0 + m) / g;
        double hi = 0.0;
        if (mode == ConstraintMode::force_guseinov_zafer) {
            const double room = 2.0 - m - abs_a;
            if (room <= 0.0) continue;
            hi = room * room / (q.int_b * p);
        } else if (mode == ConstraintMode::force_wang) {
            hi = (4.0 * std::exp(-2.0 * abs_a) - m) / (q.int_b * p);
        } else {
            hi = (4.0 - m) / (std::exp(2.0 * abs_a) * q.int_b * p);
        }
        if (!(hi > lo * (1.0 + 1e-6))) continue;
        const double u = d.unit();
        const double s = hi - (hi - lo) * u * u;
        // Keep the strict inequalities clear of the rounding in the constructed quantities.
        const double s_safe = std::clamp(s, lo + 1e-9 * (hi - lo), hi - 1e-9 * (hi - lo));
        return build(dr, lambda, s_safe);
    }
    return std::nullopt;
}

/// Impulse-free system with b constant per segment and c = lambda^2 a^2 / b + s g, g > 0,
/// so that b c - a^2 >= 0 pointwise; lambda and s place the sum condition below 2 - margin.
std::optional<ImpulsiveSystem> try_force_krein(const GeneratorSpec& spec, Draw& d) {
    Draft dr = draft(spec, d, false, true);
    std::vector<Polynomial> a2_over_b, g;
    std::vector<double> edges{0.0};
    edges.insert(edges.end(), dr.breakpoints.begin(), dr.breakpoints.end());
    edges.push_back(dr.period);
    for (std::size_t k = 0; k < dr.a.size(); ++k) {
        a2_over_b.push_back((1.0 / dr.b[k](edges[k])) * (dr.a[k] * dr.a[k]));
        const double g2 = spec.c_amplitude * d.unit();
        g.push_back(local_polynomial({0.1 + std::abs(spec.c_offset) * d.unit() + 0.5 * g2 * d.unit(), 0.0, g2},
                                     edges[k], edges[k + 1]));
    }
    const PiecewiseFunction a = to_function(dr.period, dr.breakpoints, dr.a);
    const PiecewiseFunction b = to_function(dr.period, dr.breakpoints, dr.b);
    const double int_abs_a = integrate_piecewise(a, 0.0, dr.period, Transform::absolute_value);
    const double int_b = integrate_piecewise(b, 0.0, dr.period);
    const double int_i = integrate_piecewise(to_function(dr.period, dr.breakpoints, a2_over_b), 0.0, dr.period);
    const double int_g = integrate_piecewise(to_function(dr.period, dr.breakpoints, g), 0.0, dr.period);
    const double m = spec.margin;
    const double reach = int_abs_a + std::sqrt(int_b * int_i);
    double lambda = 1.0;
    if (reach > 0.0) lambda = std::min(1.0, d.uniform(0.3, 0.95) * (2.0 - m) / reach);
    const double floor = std::sqrt(int_b * lambda * lambda * int_i);
    const double room = 2.0 - m - lambda * int_abs_a;
    if (!(room > floor)) return std::nullopt;
    const double u = d.unit();
    const double r = floor + (room - floor) * (1.0 - u * u) * (1.0 - 1e-9);
    const double s = (r * r / int_b - lambda * lambda * int_i) / int_g;
    if (!(s > 0.0)) return std::nullopt;
    std::vector<Polynomial> c;
    for (std::size_t k = 0; k < dr.a.size(); ++k) c.push_back((lambda * lambda) * a2_over_b[k] + s * g[k]);
    dr.c = std::move(c);
    return build(dr, lambda, 1.0);
}

bool certified_by(const ImpulsiveSystem& sys, ConstraintMode mode) {
    switch (mode) {
        case ConstraintMode::force_main: return check_main(sys).certified();
        case ConstraintMode::force_guseinov_zafer: return check_guseinov_zafer(sys).certified();
        case ConstraintMode::force_krein: return check_krein(sys).certified();
        case ConstraintMode::force_wang: return check_wang(sys).certified();
        default: return true;
    }
}

}  // namespace

ImpulsiveSystem generate(const GeneratorSpec& spec) {
    validate(spec);
    Draw d(spec.seed);
    switch (spec.mode) {
        case ConstraintMode::unconstrained: return build(draft(spec, d, true, false));
        case ConstraintMode::impulse_free: return build(draft(spec, d, false, false));
        case ConstraintMode::force_alpha_product_one: {
            Draft dr = draft(spec, d, true, false);
            force_alpha_product_one(dr, d, spec);
            return build(dr);
        }
        default: break;
    }
    for (int attempt = 0; attempt < spec.max_attempts; ++attempt) {
        auto sys = spec.mode == ConstraintMode::force_krein ? try_force_krein(spec, d)
                                                            : try_force_integral(spec, d, spec.mode);
        if (sys && certified_by(*sys, spec.mode)) return std::move(*sys);
    }
    throw GenerationError("constraint " + to_string(spec.mode) + " not met within " +
                          std::to_string(spec.max_attempts) + " attempts");
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

SystemRecord analyze_record(const ImpulsiveSystem& sys, std::size_t index, const SweepOptions& opt) {
    SystemRecord rec;
    rec.index = index;
    const auto summary = evaluate_all(sys, opt.criteria);
    for (std::size_t k = 0; k < criterion_count; ++k) {
        rec.conclusions[k] = summary.reports[k].conclusion;
        rec.min_margins[k] = summary.reports[k].min_strict_margin();
    }
    rec.certified = summary.any_certified;
    const auto m = monodromy(sys, opt.integration);
    const auto v = classify(m, opt.classify_tolerance);
    rec.trace_a = m.trace_a;
    rec.b = m.b;
    rec.verdict = to_string(v.category);
    rec.violation = rec.certified && (v.category != StabilityCategory::stable || m.trace_a * m.trace_a >= 4.0 ||
                                      std::abs(m.b - 1.0) > opt.b_tolerance);
    return rec;
}

}  // namespace

SoundnessSummary soundness_sweep(const GeneratorSpec& spec, std::size_t n, const SweepOptions& options) {
    validate(spec);
    SoundnessSummary out;
    out.n = n;
    out.records.resize(n);
    std::vector<std::optional<std::pair<bool, bool>>> wang_cross(n);
    parallel_for(n, options.workers, [&](std::size_t i) {
        SystemRecord& rec = out.records[i];
        rec.index = i;
        try {
            const auto sys = generate(offset_spec(spec, i));
            rec = analyze_record(sys, i, options);
            const auto q = compute_quantities(sys, options.criteria);
            if (q.int_abs_a == 0.0 && rec.conclusions[4] == Conclusion::certified_stable) {
                const auto krein = check_krein(q, options.criteria);
                bool sum_ok = false;
                for (const auto& c : krein.conditions)
                    if (c.label.rfind("int |a| + [int b int c]", 0) == 0) sum_ok = c.status == ConditionStatus::satisfied;
                wang_cross[i] = std::make_pair(true, sum_ok);
            }
        } catch (const GenerationError& e) {
            rec.status = std::string("generation-error: ") + e.what();
        } catch (const IntegrationError& e) {
            rec.status = std::string("integration-error: ") + e.what();
        } catch (const EvaluationError& e) {
            rec.status = std::string("evaluation-error: ") + e.what();
        }
    });
    for (std::size_t i = 0; i < n; ++i) {
        const SystemRecord& rec = out.records[i];
        if (rec.status != "ok") {
            ++out.failures;
            continue;
        }
        if (wang_cross[i]) {
            ++out.wang_zero_a;
            out.wang_zero_a_krein_sum += wang_cross[i]->second;
        }
        if (!rec.certified) continue;
        ++out.certified;
        for (std::size_t k = 0; k < criterion_count; ++k)
            if (rec.conclusions[k] == Conclusion::certified_stable) {
                ++out.certified_by[k];
                out.worst_margin = std::min(out.worst_margin, rec.min_margins[k]);
            }
        out.min_gap = std::min(out.min_gap, 4.0 - rec.trace_a * rec.trace_a);
        out.max_b_deviation = std::max(out.max_b_deviation, std::abs(rec.b - 1.0));
        if (rec.violation) {
            ++out.violations;
            out.violation_indices.push_back(i);
        }
    }
    return out;
}

namespace {

const char* const kCriterionNames[criterion_count] = {"krein", "guseinov-kaymakcalan", "guseinov-zafer",
                                                       "guseinov-zafer-boundary", "wang", "main", "main-boundary"};

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

json to_json(const SoundnessSummary& s, bool include_records) {
    json by = json::object();
    for (std::size_t k = 0; k < criterion_count; ++k) by[kCriterionNames[k]] = s.certified_by[k];
    json out = {{"n", s.n},
                {"certified", s.certified},
                {"certified_by", by},
                {"violations", s.violations},
                {"violation_indices", s.violation_indices},
                {"failures", s.failures},
                {"min_gap", finite_or_null(s.min_gap)},
                {"max_b_deviation", s.max_b_deviation},
                {"worst_margin", finite_or_null(s.worst_margin)},
                {"wang_zero_a", s.wang_zero_a},
                {"wang_zero_a_krein_sum", s.wang_zero_a_krein_sum}};
    if (include_records) {
        json rows = json::array();
        for (const auto& r : s.records) {
            json conclusions = json::object();
            for (std::size_t k = 0; k < criterion_count; ++k) conclusions[kCriterionNames[k]] = to_string(r.conclusions[k]);
            rows.push_back({{"seed_offset", r.index},
                            {"A", finite_or_null(r.trace_a)},
                            {"B", finite_or_null(r.b)},
                            {"conclusions", conclusions},
                            {"verdict", r.verdict},
                            {"status", r.status}});
        }
        out["records"] = rows;
    }
    return out;
}

std::string to_csv(const SoundnessSummary& s) {
    std::ostringstream out;
    out << "seed-offset,A,B";
    for (const char* name : kCriterionNames) out << ',' << name;
    out << ",verdict,status\n";
    for (const auto& r : s.records) {
        out << r.index << ',' << format_number(r.trace_a) << ',' << format_number(r.b);
        for (std::size_t k = 0; k < criterion_count; ++k)
            out << ',' << (r.status == "ok" ? to_string(r.conclusions[k]) : "");
        out << ',' << r.verdict << ',' << r.status << '\n';
    }
    return out.str();
}

namespace {

LyapunovRecord lyapunov_record(const ImpulsiveSystem& sys, std::size_t index, const LyapunovSweepOptions& opt) {
    LyapunovRecord rec;
    rec.index = index;
    const auto q = compute_quantities(sys);
    if (!(q.min_b > 0.0)) {
        rec.status = "skipped: b not positive";
        return rec;
    }
    const double T = sys.period();
    const double window = opt.periods * T;
    const int grid = std::max(16, static_cast<int>(std::ceil(opt.search.points_per_period * opt.periods)));
    const double resolution = opt.search.resolution * T;
    for (int k = 0; k < opt.directions; ++k) {
        const double theta = std::numbers::pi * k / opt.directions;
        auto solution = std::make_shared<const RescaledSolution>(
            sys, integrate_state(sys, State{0.0, std::cos(theta), std::sin(theta), Side::right}, window,
                                 opt.search.integration));
        const auto zeros = zeros_of(*solution, 0.0, window, grid, resolution);
        for (std::size_t j = 0; j + 1 < zeros.size(); ++j) {
            ZeroPair pair;
            pair.t1 = zeros[j];
            pair.t2 = zeros[j + 1];
            pair.solution = solution;
            if (!(pair.t2 - pair.t1 > 1e-10 * T)) continue;
            const auto w = lyapunov_verify(sys, pair, {256, opt.tolerance});
            ++rec.pairs;
            rec.min_lhs = std::min(rec.min_lhs, w.lhs);
            if (!w.holds) ++rec.failures;
        }
    }
    return rec;
}

LyapunovSummary reduce(std::vector<LyapunovRecord> records) {
    LyapunovSummary out;
    out.n = records.size();
    for (const auto& r : records) {
        if (r.status != "ok") {
            ++out.skipped;
            continue;
        }
        out.pairs += r.pairs;
        out.failures += r.failures;
        out.systems_with_pairs += r.pairs > 0;
        out.min_lhs = std::min(out.min_lhs, r.min_lhs);
    }
    out.records = std::move(records);
    return out;
}

template <class Source>
LyapunovSummary run_lyapunov(std::size_t n, const LyapunovSweepOptions& options, Source&& source) {
    std::vector<LyapunovRecord> records(n);
    parallel_for(n, options.workers, [&](std::size_t i) {
        records[i].index = i;
        try {
            records[i] = lyapunov_record(source(i), i, options);
        } catch (const std::exception& e) {
            records[i].status = std::string("error: ") + e.what();
        }
    });
    return reduce(std::move(records));
}

}  // namespace

LyapunovSummary lyapunov_sweep(const GeneratorSpec& spec, std::size_t n, const LyapunovSweepOptions& options) {
    validate(spec);
    return run_lyapunov(n, options, [&](std::size_t i) { return generate(offset_spec(spec, i)); });
}

LyapunovSummary lyapunov_sweep(const std::vector<ImpulsiveSystem>& systems, const LyapunovSweepOptions& options) {
    return run_lyapunov(systems.size(), options, [&](std::size_t i) { return systems[i]; });
}

json to_json(const LyapunovSummary& s, bool include_records) {
    json out = {{"n", s.n},
                {"systems_with_pairs", s.systems_with_pairs},
                {"pairs", s.pairs},
                {"failures", s.failures},
                {"skipped", s.skipped},
                {"min_lhs", finite_or_null(s.min_lhs)}};
    if (include_records) {
        json rows = json::array();
        for (const auto& r : s.records)
            rows.push_back({{"index", r.index},
                            {"pairs", r.pairs},
                            {"failures", r.failures},
                            {"min_lhs", finite_or_null(r.min_lhs)},
                            {"status", r.status}});
        out["records"] = rows;
    }
    return out;
}

}  // namespace impulse_floquet::harness
