#include "impulse_floquet/descriptor.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "impulse_floquet/errors.hpp"

namespace impulse_floquet {

namespace {

using nlohmann::json;

double number(const json& node, const std::string& field) {
    if (!node.is_number()) throw DescriptorError(field, "expected a number");
    const double v = node.get<double>();
    if (!std::isfinite(v)) throw DescriptorError(field, "must be finite");
    return v;
}

void reject_unknown(const json& node, const std::string& field, std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : node.items()) {
        bool known = false;
        for (const char* a : allowed) known = known || key == a;
        if (!known) throw DescriptorError(field.empty() ? key : field + "." + key, "unknown field");
    }
}

PiecewiseFunction coefficient(const json& node, const std::string& field, double period) {
    if (!node.is_array() || node.empty()) throw DescriptorError(field, "expected a non-empty array of segments");
    std::vector<double> breakpoints;
    std::vector<Segment> segments;
    double previous = 0.0;
    for (std::size_t k = 0; k < node.size(); ++k) {
        const std::string f = field + "[" + std::to_string(k) + "]";
        const json& seg = node[k];
        if (!seg.is_object()) throw DescriptorError(f, "expected an object with \"end\" and \"poly\"");
        reject_unknown(seg, f, {"end", "poly"});
        if (!seg.contains("end")) throw DescriptorError(f + ".end", "missing");
        if (!seg.contains("poly")) throw DescriptorError(f + ".poly", "missing");
        const double end = number(seg["end"], f + ".end");
        if (!(end > previous)) throw DescriptorError(f + ".end", "segment ends must increase strictly from 0");
        const bool last = k + 1 == node.size();
        if (last && end != period) throw DescriptorError(f + ".end", "last segment must end at the period");
        if (!last && !(end < period)) throw DescriptorError(f + ".end", "segment ends past the period");
        const json& poly = seg["poly"];
        if (!poly.is_array() || poly.empty()) throw DescriptorError(f + ".poly", "expected a non-empty array");
        std::vector<double> coeffs;
        for (std::size_t j = 0; j < poly.size(); ++j)
            coeffs.push_back(number(poly[j], f + ".poly[" + std::to_string(j) + "]"));
        segments.emplace_back(Polynomial(std::move(coeffs)));
        if (!last) breakpoints.push_back(end);
        previous = end;
    }
    return PiecewiseFunction(period, std::move(breakpoints), std::move(segments));
}

std::string impulse_field(const Violation& v) {
    const std::string base = "impulses[" + std::to_string(*v.impulse) + "]";
    switch (v.kind) {
        case ViolationKind::zero_multiplier: return base + ".alpha";
        case ViolationKind::nonfinite_parameter: return base;
        default: return base + ".tau";
    }
}

}  // namespace

ImpulsiveSystem system_from_json(const json& d) {
    if (!d.is_object()) throw DescriptorError("<root>", "expected a JSON object");
    reject_unknown(d, "", {"period", "coefficients", "impulses"});
    if (!d.contains("period")) throw DescriptorError("period", "missing");
    const double period = number(d["period"], "period");
    if (!(period > 0.0)) throw DescriptorError("period", "must be positive");
    if (!d.contains("coefficients") || !d["coefficients"].is_object())
        throw DescriptorError("coefficients", "expected an object with \"a\", \"b\", \"c\"");
    const json& coeffs = d["coefficients"];
    reject_unknown(coeffs, "coefficients", {"a", "b", "c"});
    for (const char* name : {"a", "b", "c"})
        if (!coeffs.contains(name)) throw DescriptorError(std::string("coefficients.") + name, "missing");

    PiecewiseFunction a = coefficient(coeffs["a"], "coefficients.a", period);
    PiecewiseFunction b = coefficient(coeffs["b"], "coefficients.b", period);
    PiecewiseFunction c = coefficient(coeffs["c"], "coefficients.c", period);

    std::vector<Impulse> impulses;
    if (d.contains("impulses")) {
        const json& imps = d["impulses"];
        if (!imps.is_array()) throw DescriptorError("impulses", "expected an array");
        for (std::size_t i = 0; i < imps.size(); ++i) {
            const std::string f = "impulses[" + std::to_string(i) + "]";
            if (!imps[i].is_object()) throw DescriptorError(f, "expected an object");
            reject_unknown(imps[i], f, {"tau", "alpha", "beta"});
            if (!imps[i].contains("tau")) throw DescriptorError(f + ".tau", "missing");
            Impulse imp{number(imps[i]["tau"], f + ".tau")};
            if (imps[i].contains("alpha")) imp.alpha = number(imps[i]["alpha"], f + ".alpha");
            if (imps[i].contains("beta")) imp.beta = number(imps[i]["beta"], f + ".beta");
            impulses.push_back(imp);
        }
    }
    ImpulsiveSystem system(std::move(a), std::move(b), std::move(c), ImpulseSchedule(period, std::move(impulses)));
    const auto violations = validate_system(system);
    if (!violations.empty()) {
        const Violation& v = violations.front();
        throw DescriptorError(v.impulse ? impulse_field(v) : std::string("<system>"), v.message);
    }
    return system;
}

ImpulsiveSystem parse_descriptor(const std::string& text) {
    json d;
    try {
        d = json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1, column = 1;
        for (std::size_t k = 0; k + 1 < e.byte && k < text.size(); ++k) {
            if (text[k] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        std::ostringstream msg;
        msg << "line " << line << ", column " << column << ": syntax error";
        throw DescriptorError("<json>", msg.str());
    }
    return system_from_json(d);
}

ImpulsiveSystem load_descriptor(const std::string& path_or_inline) {
    const auto first = path_or_inline.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && path_or_inline[first] == '{') return parse_descriptor(path_or_inline);
    std::ifstream in(path_or_inline, std::ios::binary);
    if (!in) throw DescriptorError("<input>", "cannot open " + path_or_inline);
    std::ostringstream text;
    text << in.rdbuf();
    return parse_descriptor(text.str());
}

nlohmann::json system_to_json(const ImpulsiveSystem& system) {
    const double T = system.period();
    const auto& sched = system.schedule();
    const auto is_impulse_time = [&sched](double t) {
        for (const auto& imp : sched.impulses())
            if (imp.tau == t) return true;
        return false;
    };
    const auto coefficient_json = [&](const PiecewiseFunction& f, const char* name) {
        json segs = json::array();
        for (std::size_t k = 0; k < f.segment_count(); ++k) {
            const Polynomial* p = f.segment(k).polynomial();
            if (!p) throw DomainError(std::string("coefficient ") + name + " has a callable segment");
            const double end = k + 1 == f.segment_count() ? T : f.breakpoints()[k];
            // Breakpoints injected at impulse times are dropped when both sides agree.
            if (k + 1 < f.segment_count() && is_impulse_time(end) &&
                f.segment(k + 1).polynomial() && f.segment(k + 1).polynomial()->coefficients() == p->coefficients())
                continue;
            segs.push_back({{"end", end}, {"poly", p->coefficients()}});
        }
        return segs;
    };
    json imps = json::array();
    for (const auto& imp : sched.impulses()) imps.push_back({{"tau", imp.tau}, {"alpha", imp.alpha}, {"beta", imp.beta}});
    return {{"period", T},
            {"coefficients",
             {{"a", coefficient_json(system.a(), "a")},
              {"b", coefficient_json(system.b(), "b")},
              {"c", coefficient_json(system.c(), "c")}}},
            {"impulses", imps}};
}

}  // namespace impulse_floquet
