#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "impulse_floquet/criteria.hpp"
#include "impulse_floquet/floquet.hpp"
#include "impulse_floquet/lyapunov.hpp"

namespace impulse_floquet::harness {

enum class ConstraintMode {
    unconstrained,
    force_main,               // hypotheses of the main criterion with the requested margin
    force_guseinov_zafer,     // hypotheses of the Guseinov-Zafer criterion with the requested margin
    force_alpha_product_one,  // last alpha chosen so that prod alpha^2 = 1
    impulse_free,
    force_krein,              // impulse-free, Krein hypotheses
    force_wang,               // impulse-free, Wang hypotheses
};

std::string to_string(ConstraintMode mode);
std::optional<ConstraintMode> parse_mode(const std::string& name);

struct GeneratorSpec {
    std::uint64_t seed = 0;
    int segments_min = 1;
    int segments_max = 3;
    int degree = 2;  // polynomial degree of a and c segments
    double period_min = 0.5;
    double period_max = 2.0;
    double a_amplitude = 0.5;
    double b_min = 0.2;
    double b_max = 1.5;
    double c_offset = 0.5;
    double c_amplitude = 2.0;
    int impulses_min = 0;
    int impulses_max = 3;
    double alpha_min = 0.5;  // range of |alpha|
    double alpha_max = 2.0;
    double negative_alpha_probability = 0.3;
    double beta_max = 1.0;
    ConstraintMode mode = ConstraintMode::unconstrained;
    double margin = 1e-3;
    int max_attempts = 200;
};

/// Throws std::invalid_argument for inconsistent ranges.
void validate(const GeneratorSpec& spec);

/// Deterministic in the spec. Throws GenerationError when the constraint mode
/// cannot be met within max_attempts draws.
ImpulsiveSystem generate(const GeneratorSpec& spec);

/// Spec of the i-th system of a sweep: the seed is mixed with the offset.
GeneratorSpec offset_spec(const GeneratorSpec& spec, std::uint64_t offset);

/// Runs f(0), ..., f(n - 1) on `workers` threads (0 means hardware concurrency).
/// f must not throw.
template <class F>
void parallel_for(std::size_t n, unsigned workers, F&& f) {
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) f(i);
        });
    for (auto& t : pool) t.join();
}

struct SweepOptions {
    unsigned workers = 1;
    CriteriaTolerances criteria;
    Tolerances integration;
    double classify_tolerance = 1e-7;
    double b_tolerance = 1e-9;  // |B - 1| bound for certified systems
};

inline constexpr std::size_t criterion_count = 7;

struct SystemRecord {
    std::size_t index = 0;
    double trace_a = std::numeric_limits<double>::quiet_NaN();
    double b = std::numeric_limits<double>::quiet_NaN();
    std::string verdict;
    std::array<Conclusion, criterion_count> conclusions{};
    std::array<double, criterion_count> min_margins{};
    bool certified = false;
    bool violation = false;
    std::string status = "ok";
};

struct SoundnessSummary {
    std::size_t n = 0;
    std::size_t certified = 0;
    std::size_t violations = 0;
    std::size_t failures = 0;
    std::array<std::size_t, criterion_count> certified_by{};
    double min_gap = std::numeric_limits<double>::infinity();  // min of 4 - A^2 over certified systems
    double max_b_deviation = 0.0;                               // max |B - 1| over certified systems
    double worst_margin = std::numeric_limits<double>::infinity();
    std::size_t wang_zero_a = 0;              // Wang-certified systems with a = 0
    std::size_t wang_zero_a_krein_sum = 0;    // ... whose Krein sum condition is satisfied
    std::vector<std::size_t> violation_indices;
    std::vector<SystemRecord> records;
};

SoundnessSummary soundness_sweep(const GeneratorSpec& spec, std::size_t n, const SweepOptions& options = {});

nlohmann::json to_json(const SoundnessSummary& summary, bool include_records = false);
std::string to_csv(const SoundnessSummary& summary);

struct LyapunovSweepOptions {
    unsigned workers = 1;
    int directions = 8;
    double periods = 4.0;
    double tolerance = 1e-6;
    ZeroSearchOptions search;
};

struct LyapunovRecord {
    std::size_t index = 0;
    std::size_t pairs = 0;
    std::size_t failures = 0;
    double min_lhs = std::numeric_limits<double>::infinity();
    std::string status = "ok";
};

struct LyapunovSummary {
    std::size_t n = 0;
    std::size_t systems_with_pairs = 0;
    std::size_t pairs = 0;
    std::size_t failures = 0;
    std::size_t skipped = 0;  // b not positive, or generation/integration error
    double min_lhs = std::numeric_limits<double>::infinity();
    std::vector<LyapunovRecord> records;
};

LyapunovSummary lyapunov_sweep(const GeneratorSpec& spec, std::size_t n, const LyapunovSweepOptions& options = {});
LyapunovSummary lyapunov_sweep(const std::vector<ImpulsiveSystem>& systems, const LyapunovSweepOptions& options = {});

nlohmann::json to_json(const LyapunovSummary& summary, bool include_records = false);

/// Shortest round-trip decimal text; "nan", "inf", "-inf" for non-finite values.
std::string format_number(double v);

}  // namespace impulse_floquet::harness
