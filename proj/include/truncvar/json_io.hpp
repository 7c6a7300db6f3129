#pragma once

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "truncvar/envelope.hpp"
#include "truncvar/errors.hpp"
#include "truncvar/play.hpp"
#include "truncvar/rates.hpp"
#include "truncvar/step_function.hpp"
#include "truncvar/variation.hpp"

namespace truncvar {

// Key order is fixed everywhere so identical inputs serialise to identical
// bytes.
using json = nlohmann::ordered_json;

inline json to_json(const StepFunction& f) {
    return json{{"knots", f.knots()},
                {"point_values", f.point_values()},
                {"interval_values", f.interval_values()}};
}

inline StepFunction step_function_from_json(const json& j) {
    if (j.is_object() && j.contains("xi") && !j.contains("knots"))
        return step_function_from_json(j.at("xi")); // play output reloads as xi
    if (!j.is_object() || !j.contains("knots") || !j.contains("point_values") ||
        !j.contains("interval_values"))
        throw ParseError("expected an object with knots, point_values, interval_values");
    return StepFunction(j.at("knots").get<std::vector<double>>(),
                        j.at("point_values").get<std::vector<double>>(),
                        j.at("interval_values").get<std::vector<double>>());
}

inline json to_json(const TimeLabel& label) {
    if (label.is_knot) return json{{"kind", "knot"}, {"t", label.t0}};
    return json{{"kind", "open"}, {"t0", label.t0}, {"t1", label.t1}};
}

inline json to_json(const VariationProfile& p) {
    json times = json::array();
    for (const auto& label : p.times) times.push_back(to_json(label));
    return json{{"times", times}, {"tv", p.tv}, {"utv", p.utv}, {"dtv", p.dtv}};
}

inline json to_json(const EnvelopeResult& e) {
    json switches = json::array();
    for (const auto& s : e.switches)
        switches.push_back(json{{"index", s.index},
                                {"direction", s.direction == Direction::Up ? "up" : "down"}});
    const char* branch = e.branch == StartBranch::Up     ? "up"
                         : e.branch == StartBranch::Down ? "down"
                                                         : "flat";
    return json{{"envelope", to_json(e.envelope)},
                {"profile", to_json(e.profile)},
                {"switches", switches},
                {"branch", branch},
                {"start_value", e.start_value}};
}

inline json to_json(const PlayResult& r) {
    return json{{"xi", to_json(r.xi)},
                {"xi_u", to_json(r.xi_u)},
                {"xi_d", to_json(r.xi_d)},
                {"phi", to_json(r.phi)},
                {"start", r.start}};
}

inline json to_json(const std::vector<SkorohodViolation>& violations) {
    json arr = json::array();
    for (const auto& v : violations)
        arr.push_back(json{{"index", v.index}, {"kind", v.kind}, {"gap", v.gap}});
    return json{{"violations", arr}, {"count", violations.size()}};
}

inline json to_json(const RateReport& r) {
    return json{{"c_grid", r.c_grid},
                {"tv_mean", r.tv_mean},
                {"tv_stderr", r.tv_stderr},
                {"tv_median", r.tv_median},
                {"c_times_tv", r.c_times_tv},
                {"slope", r.slope},
                {"slope_ci", r.slope_ci},
                {"slope_median", r.slope_median},
                {"warnings", r.warnings}};
}

inline json to_json(const Lemma1Result& r) {
    json rows = json::array();
    for (const auto& row : r.rows)
        rows.push_back(json{{"c", row.c},
                            {"c_tv_base", row.c_tv_base},
                            {"c_tv_sum", row.c_tv_sum},
                            {"ratio", row.ratio},
                            {"est1_ok", row.est1_ok},
                            {"est2_ok", row.est2_ok}});
    return json{{"rows", rows}, {"sandwich_violations", r.sandwich_violations}};
}

namespace detail {

inline std::string shortest_repr(double x) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    (void)ec;
    return std::string(buf, ptr);
}

} // namespace detail

/// "time,value" rows; a leading header line is allowed.
inline StepFunction read_samples_csv(std::istream& in) {
    std::vector<double> times, values;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw ParseError("CSV line " + std::to_string(lineno) + " has no comma");
        const std::string a = line.substr(0, comma);
        const std::string b = line.substr(comma + 1);
        char* end = nullptr;
        const double t = std::strtod(a.c_str(), &end);
        if (end == a.c_str()) {
            if (lineno == 1) continue; // header
            throw ParseError("CSV line " + std::to_string(lineno) + ": bad time '" + a + "'");
        }
        char* end2 = nullptr;
        const double v = std::strtod(b.c_str(), &end2);
        if (end2 == b.c_str())
            throw ParseError("CSV line " + std::to_string(lineno) + ": bad value '" + b + "'");
        times.push_back(t);
        values.push_back(v);
    }
    return from_samples(times, values);
}

/// Writes the sample rows back with shortest round-trip formatting, so
/// read_samples_csv reproduces the function bit-exactly.
inline void write_samples_csv(std::ostream& out, const StepFunction& f) {
    out << "time,value\n";
    for (std::size_t k = 0; k < f.knot_count(); ++k)
        out << detail::shortest_repr(f.knots()[k]) << ','
            << detail::shortest_repr(f.point_values()[k]) << '\n';
}

inline StepFunction load_step_function(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv") return read_samples_csv(in);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ParseError("cannot parse '" + path + "': " + e.what());
    }
    return step_function_from_json(j);
}

} // namespace truncvar
