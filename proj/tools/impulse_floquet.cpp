#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "impulse_floquet/descriptor.hpp"
#include "impulse_floquet/errors.hpp"
#include "impulse_floquet/harness.hpp"
#include "impulse_floquet/report.hpp"
#include "impulse_floquet/simulate.hpp"

namespace {

using namespace impulse_floquet;
using nlohmann::json;
using harness::format_number;

constexpr int exit_malformed = 2;
constexpr int exit_integration = 3;
constexpr int exit_soundness = 4;

struct RunConfig {
    std::string input;
    std::string format = "json";
    double tol_abs = Tolerances{}.abs;
    double tol_rel = Tolerances{}.rel;
    double tol_strict = CriteriaTolerances{}.strict;
    unsigned workers = 1;
    std::vector<std::string> axes;
    std::uint64_t seed = 0;
    std::size_t n = 100;
    double t1 = 0.0, t2 = 1.0;
    int periods = 10;
    int samples = 32;
    double x0 = 1.0, u0 = 0.0;

    Tolerances integration() const { return {tol_abs, tol_rel}; }
    CriteriaTolerances criteria() const {
        CriteriaTolerances t;
        t.strict = tol_strict;
        return t;
    }
};

std::string read_input(const std::string& input) {
    if (input == "-") return std::string(std::istreambuf_iterator<char>(std::cin), {});
    return input;
}

ImpulsiveSystem load(const RunConfig& cfg) {
    if (cfg.input == "-") return parse_descriptor(read_input(cfg.input));
    return load_descriptor(cfg.input);
}

json load_json(const RunConfig& cfg) {
    std::string text = read_input(cfg.input);
    const auto first = text.find_first_not_of(" \t\r\n");
    if (cfg.input != "-" && (first == std::string::npos || text[first] != '{')) {
        std::ifstream in(cfg.input, std::ios::binary);
        if (!in) throw DescriptorError("<input>", "cannot open " + cfg.input);
        std::ostringstream s;
        s << in.rdbuf();
        text = s.str();
    }
    try {
        return json::parse(text);
    } catch (const json::parse_error&) {
        parse_descriptor(text);  // rethrows with line and column
        throw;
    }
}

const char* mark(ConditionStatus s) {
    switch (s) {
        case ConditionStatus::satisfied: return "✓";
        case ConditionStatus::violated: return "✗";
        case ConditionStatus::marginal: return "≈";
        case ConditionStatus::undecidable: return "?";
    }
    return "?";
}

void print_criteria_human(std::ostream& out, const CriteriaSummary& s) {
    for (const auto& r : s.reports) {
        out << to_string(r.id) << ": " << to_string(r.conclusion);
        if (!r.note.empty()) out << " (" << r.note << ")";
        out << '\n';
        for (const auto& c : r.conditions)
            out << "  " << mark(c.status) << ' ' << c.label << "  margin " << format_number(c.margin) << '\n';
    }
    out << "condition (C): " << to_string(s.condition_c.branch) << " (" << s.condition_c.reason << ")\n";
    out << "any criterion certifies: " << (s.any_certified ? "yes" : "no") << '\n';
}

std::string criteria_header() {
    std::string h;
    for (auto id : {CriterionId::krein, CriterionId::guseinov_kaymakcalan, CriterionId::guseinov_zafer,
                    CriterionId::guseinov_zafer_boundary, CriterionId::wang, CriterionId::main,
                    CriterionId::main_boundary})
        h += "," + to_string(id);
    return h;
}

std::string criteria_cells(const CriteriaSummary& s) {
    std::string row;
    for (const auto& r : s.reports) row += "," + to_string(r.conclusion);
    return row;
}

int cmd_analyze(const RunConfig& cfg, bool criteria_only) {
    const auto sys = load(cfg);
    const auto summary = evaluate_all(sys, cfg.criteria());
    if (criteria_only) {
        if (cfg.format == "human") print_criteria_human(std::cout, summary);
        else if (cfg.format == "csv") std::cout << criteria_header().substr(1) << '\n' << criteria_cells(summary).substr(1) << '\n';
        else std::cout << to_json(summary).dump(2) << '\n';
        return 0;
    }
    const auto m = monodromy(sys, cfg.integration());
    const auto v = classify(m);
    if (cfg.format == "human") {
        const auto& x = m.monodromy.matrix;
        std::cout << "monodromy X(T) = [[" << format_number(x.xx) << ", " << format_number(x.xu) << "], ["
                  << format_number(x.ux) << ", " << format_number(x.uu) << "]]\n"
                  << "A = " << format_number(m.trace_a) << "  B = " << format_number(m.b)
                  << "  det X(T) = " << format_number(m.det) << '\n';
        for (const auto& rho : m.multipliers)
            std::cout << "multiplier " << format_number(rho.real()) << (rho.imag() < 0 ? " - " : " + ")
                      << format_number(std::abs(rho.imag())) << "i  |rho| = " << format_number(std::abs(rho)) << '\n';
        std::cout << "verdict: " << to_string(v.category) << '\n';
        if (v.bounded_solution)
            std::cout << "bounded solution through (" << format_number(v.bounded_solution->x) << ", "
                      << format_number(v.bounded_solution->u) << ")\n";
        print_criteria_human(std::cout, summary);
    } else if (cfg.format == "csv") {
        std::cout << "A,B,verdict" << criteria_header() << '\n'
                  << format_number(m.trace_a) << ',' << format_number(m.b) << ',' << to_string(v.category)
                  << criteria_cells(summary) << '\n';
    } else {
        std::cout << analysis_report(m, v, summary).dump(2) << '\n';
    }
    return 0;
}

struct Axis {
    std::string path;
    json::json_pointer pointer;
    double lo, hi;
    int steps;
};

json::json_pointer to_pointer(const std::string& path) {
    std::string p;
    std::string token;
    for (char ch : path) {
        if (ch == '.' || ch == '[' || ch == ']') {
            if (!token.empty()) p += "/" + token;
            token.clear();
        } else {
            token += ch;
        }
    }
    if (!token.empty()) p += "/" + token;
    return json::json_pointer(p);
}

Axis parse_axis(const std::string& spec, const json& descriptor) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
    if (parts.size() != 4) throw DescriptorError("--axes", "expected path:lo:hi:steps, got " + spec);
    Axis axis;
    axis.path = parts[0];
    try {
        axis.pointer = to_pointer(parts[0]);
        axis.lo = std::stod(parts[1]);
        axis.hi = std::stod(parts[2]);
        axis.steps = std::stoi(parts[3]);
    } catch (const std::exception&) {
        throw DescriptorError("--axes", "cannot parse " + spec);
    }
    if (axis.steps < 2) throw DescriptorError("--axes", "step count must be at least 2");
    if (!descriptor.contains(axis.pointer) || !descriptor.at(axis.pointer).is_number())
        throw DescriptorError(axis.path, "sweep axis does not name a numeric descriptor field");
    return axis;
}

/// Sets the period and moves segment ends and impulse times proportionally.
void stretch_period(json& d, double period) {
    if (!d["period"].is_number() || !(d["period"].get<double>() > 0.0)) return;
    const double old = d["period"].get<double>();
    const double factor = period / old;
    d["period"] = period;
    if (d.contains("coefficients") && d["coefficients"].is_object())
        for (auto& [name, segments] : d["coefficients"].items())
            if (segments.is_array())
                for (auto& seg : segments)
                    if (seg.is_object() && seg.contains("end") && seg["end"].is_number())
                        seg["end"] = seg["end"].get<double>() == old ? period : seg["end"].get<double>() * factor;
    if (d.contains("impulses") && d["impulses"].is_array())
        for (auto& imp : d["impulses"])
            if (imp.is_object() && imp.contains("tau") && imp["tau"].is_number()) imp["tau"] = imp["tau"].get<double>() * factor;
}

std::string csv_safe(std::string s) {
    for (char& ch : s)
        if (ch == ',' || ch == '\n' || ch == '"') ch = ';';
    return s;
}

int cmd_sweep(const RunConfig& cfg) {
    const json base = load_json(cfg);
    system_from_json(base);
    std::vector<std::string> axis_specs;
    for (const auto& a : cfg.axes) {
        std::stringstream ss(a);
        for (std::string item; std::getline(ss, item, ',');)
            if (!item.empty()) axis_specs.push_back(item);
    }
    if (axis_specs.empty() || axis_specs.size() > 2) throw DescriptorError("--axes", "give one or two sweep axes");
    std::vector<Axis> axes;
    for (const auto& s : axis_specs) axes.push_back(parse_axis(s, base));

    const std::size_t inner = axes.size() == 2 ? static_cast<std::size_t>(axes[1].steps) : 1;
    const std::size_t total = static_cast<std::size_t>(axes[0].steps) * inner;
    const auto value = [](const Axis& a, std::size_t k) {
        return k + 1 == static_cast<std::size_t>(a.steps) ? a.hi : a.lo + (a.hi - a.lo) * k / (a.steps - 1);
    };
    struct Row {
        std::vector<double> values;
        double A = std::nan(""), B = std::nan("");
        std::string verdict;
        std::string criteria;
        std::string status = "ok";
        json report;
    };
    std::vector<Row> rows(total);
    harness::parallel_for(total, cfg.workers, [&](std::size_t idx) {
        Row& row = rows[idx];
        json d = base;
        const std::size_t ks[2] = {idx / inner, idx % inner};
        for (std::size_t j = 0; j < axes.size(); ++j) {
            row.values.push_back(value(axes[j], ks[j]));
            if (axes[j].path == "period") stretch_period(d, row.values.back());
            else d[axes[j].pointer] = row.values.back();
        }
        try {
            const auto sys = system_from_json(d);
            const auto m = monodromy(sys, cfg.integration());
            const auto v = classify(m);
            const auto s = evaluate_all(sys, cfg.criteria());
            row.A = m.trace_a;
            row.B = m.b;
            row.verdict = to_string(v.category);
            row.criteria = criteria_cells(s);
            row.report = analysis_report(m, v, s);
        } catch (const DescriptorError& e) {
            row.status = std::string("invalid: ") + e.what();
        } catch (const IntegrationError& e) {
            row.status = std::string("integration-failure: ") + e.what();
        } catch (const EvaluationError& e) {
            row.status = std::string("integration-failure: ") + e.what();
        }
        if (row.criteria.empty()) row.criteria = std::string(7, ',');
    });

    if (cfg.format == "json") {
        json out = json::array();
        for (const auto& row : rows) {
            json point = json::object();
            for (std::size_t j = 0; j < axes.size(); ++j) point[axes[j].path] = row.values[j];
            out.push_back({{"point", point}, {"status", row.status}, {"report", row.report}});
        }
        std::cout << out.dump(2) << '\n';
        return 0;
    }
    for (const auto& a : axes) std::cout << a.path << ',';
    std::cout << "A,B,verdict" << criteria_header() << ",status\n";
    for (const auto& row : rows) {
        for (double v : row.values) std::cout << format_number(v) << ',';
        std::cout << format_number(row.A) << ',' << format_number(row.B) << ',' << row.verdict << row.criteria << ','
                  << csv_safe(row.status) << '\n';
    }
    return 0;
}

int cmd_disconjugacy(const RunConfig& cfg) {
    const auto sys = load(cfg);
    if (!(cfg.t1 < cfg.t2)) throw DescriptorError("--t1/--t2", "require t1 < t2");
    const auto test = disconjugacy_test(sys, cfg.t1, cfg.t2);
    OracleOptions oracle_opt;
    oracle_opt.integration = {std::min(cfg.tol_abs, 1e-12), std::min(cfg.tol_rel, 1e-11)};
    const auto oracle = disconjugacy_oracle(sys, cfg.t1, cfg.t2, oracle_opt);
    const bool disagreement = test.verdict == DisconjugacyVerdict::disconjugate_certified &&
                              oracle.verdict == OracleVerdict::not_disconjugate;
    if (cfg.format == "human") {
        std::cout << "interval [" << format_number(cfg.t1) << ", " << format_number(cfg.t2) << "]\n"
                  << "sup over t0 of the product: " << format_number(test.sup) << " at t0 = "
                  << format_number(test.t0_at_sup) << '\n'
                  << "test: " << to_string(test.verdict) << '\n'
                  << "oracle: " << to_string(oracle.verdict) << '\n';
        if (disagreement) std::cout << "SOUNDNESS VIOLATION: certified but a two-zero solution exists\n";
    } else {
        std::cout << json{{"t1", cfg.t1},
                          {"t2", cfg.t2},
                          {"test", to_json(test)},
                          {"oracle", to_json(oracle)},
                          {"sup", test.sup},
                          {"disagreement", disagreement}}
                         .dump(2)
                  << '\n';
    }
    return disagreement ? exit_soundness : 0;
}

int cmd_simulate(const RunConfig& cfg) {
    const auto sys = load(cfg);
    if (cfg.periods < 0 || cfg.samples < 1) throw DescriptorError("--periods/--samples", "out of range");
    std::cout << "t,x,u,z,v,status\n";
    for (const auto& r : simulate(sys, cfg.periods, cfg.samples, {cfg.x0, cfg.u0}, cfg.integration()))
        std::cout << format_number(r.t) << ',' << format_number(r.x) << ',' << format_number(r.u) << ','
                  << format_number(r.z) << ',' << format_number(r.v) << ',' << (r.finite ? "ok" : "overflow") << '\n';
    return 0;
}

int cmd_selftest(const RunConfig& cfg) {
    harness::GeneratorSpec spec;
    spec.seed = cfg.seed;
    harness::SweepOptions opt;
    opt.workers = cfg.workers;
    opt.integration = cfg.integration();
    opt.criteria = cfg.criteria();
    json out = json::object();
    bool failed = false;
    for (auto mode : {harness::ConstraintMode::force_main, harness::ConstraintMode::force_guseinov_zafer,
                      harness::ConstraintMode::force_krein, harness::ConstraintMode::force_wang}) {
        spec.mode = mode;
        const auto s = harness::soundness_sweep(spec, cfg.n, opt);
        failed = failed || s.violations > 0;
        out[harness::to_string(mode)] = harness::to_json(s);
    }
    harness::LyapunovSweepOptions lopt;
    lopt.workers = cfg.workers;
    spec.mode = harness::ConstraintMode::unconstrained;
    spec.c_offset = 3.0;
    const auto l = harness::lyapunov_sweep(spec, cfg.n, lopt);
    failed = failed || l.failures > 0;
    out["lyapunov"] = harness::to_json(l);
    out["passed"] = !failed;
    if (cfg.format == "human") {
        for (const auto& [name, summary] : out.items()) {
            if (!summary.is_object()) continue;
            std::cout << name << ": " << summary.dump() << '\n';
        }
        std::cout << (failed ? "selftest FAILED" : "selftest passed") << '\n';
    } else {
        std::cout << out.dump(2) << '\n';
    }
    return failed ? exit_soundness : 0;
}

unsigned default_workers() {
    if (const char* env = std::getenv("IMPULSE_FLOQUET_WORKERS")) {
        try {
            const long v = std::stol(env);
            if (v >= 0) return static_cast<unsigned>(v);
        } catch (const std::exception&) {
        }
        std::cerr << "ignoring invalid IMPULSE_FLOQUET_WORKERS=" << env << '\n';
    }
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stability analysis of periodic planar Hamiltonian systems with impulse effects"};
    app.require_subcommand(1);
    RunConfig cfg;
    cfg.workers = default_workers();

    const auto common = [&cfg](CLI::App* sub, bool needs_input) {
        auto* in = sub->add_option("--input", cfg.input, "descriptor path, inline JSON, or - for stdin");
        if (needs_input) in->required();
        sub->add_option("--tol-abs", cfg.tol_abs, "integrator absolute tolerance")->check(CLI::PositiveNumber);
        sub->add_option("--tol-rel", cfg.tol_rel, "integrator relative tolerance")->check(CLI::PositiveNumber);
        sub->add_option("--tol-strict", cfg.tol_strict, "strict-inequality tolerance of the criteria")
            ->check(CLI::PositiveNumber);
        sub->add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"json", "csv", "human"}));
        sub->add_option("--workers", cfg.workers, "worker threads (0 = all cores)");
    };

    auto* analyze = app.add_subcommand("analyze", "monodromy, multipliers, verdict and all criteria");
    common(analyze, true);
    auto* criteria = app.add_subcommand("criteria", "evaluate the stability criteria only");
    common(criteria, true);
    auto* sweep = app.add_subcommand("sweep", "grid sweep over one or two descriptor fields, CSV rows");
    common(sweep, true);
    sweep->add_option("--axes", cfg.axes, "path:lo:hi:steps, one or two (comma separated or repeated)")->required();
    auto* disc = app.add_subcommand("disconjugacy", "Lyapunov-type disconjugacy test with brute-force oracle");
    common(disc, true);
    disc->add_option("--t1", cfg.t1, "interval start")->required();
    disc->add_option("--t2", cfg.t2, "interval end")->required();
    auto* sim = app.add_subcommand("simulate", "multi-period trajectory as CSV");
    common(sim, true);
    sim->add_option("--periods", cfg.periods, "number of periods");
    sim->add_option("--samples", cfg.samples, "samples per period");
    sim->add_option("--x0", cfg.x0, "initial x");
    sim->add_option("--u0", cfg.u0, "initial u");
    auto* self = app.add_subcommand("selftest", "run the validation sweeps");
    common(self, false);
    self->add_option("--seed", cfg.seed, "generator seed");
    self->add_option("--n", cfg.n, "systems per sweep");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_malformed;
    }
    if (sweep->parsed() && !sweep->count("--format")) cfg.format = "csv";

    try {
        if (analyze->parsed()) return cmd_analyze(cfg, false);
        if (criteria->parsed()) return cmd_analyze(cfg, true);
        if (sweep->parsed()) return cmd_sweep(cfg);
        if (disc->parsed()) return cmd_disconjugacy(cfg);
        if (sim->parsed()) return cmd_simulate(cfg);
        if (self->parsed()) return cmd_selftest(cfg);
    } catch (const DescriptorError& e) {
        std::cerr << "malformed input: " << e.what() << '\n';
        return exit_malformed;
    } catch (const json::exception& e) {
        std::cerr << "malformed input: " << e.what() << '\n';
        return exit_malformed;
    } catch (const IntegrationError& e) {
        std::cerr << "integration failure: " << e.what() << " (last good t = " << e.last_good_time() << ")\n";
        return exit_integration;
    } catch (const EvaluationError& e) {
        std::cerr << "integration failure: " << e.what() << '\n';
        return exit_integration;
    }
    return 0;
}
