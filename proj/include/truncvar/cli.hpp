#pragma once

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "truncvar/envelope.hpp"
#include "truncvar/errors.hpp"
#include "truncvar/json_io.hpp"
#include "truncvar/play.hpp"
#include "truncvar/processes.hpp"
#include "truncvar/rates.hpp"
#include "truncvar/step_function.hpp"
#include "truncvar/variation.hpp"

namespace truncvar::cli {

namespace detail {

struct GlobalOpts {
    std::uint64_t seed = 0;
    double tol = 1e-9;
    std::string output = "-";
    std::string format = "json";
};

inline TimeInterval parse_interval(const std::string& s) {
    const auto comma = s.find(',');
    if (comma == std::string::npos)
        throw ParseError("interval must be 'a,b', got '" + s + "'");
    char* end = nullptr;
    const std::string a = s.substr(0, comma), b = s.substr(comma + 1);
    const double ta = std::strtod(a.c_str(), &end);
    if (end == a.c_str()) throw ParseError("bad interval start '" + a + "'");
    const double tb = std::strtod(b.c_str(), &end);
    if (end == b.c_str()) throw ParseError("bad interval end '" + b + "'");
    return TimeInterval(ta, tb);
}

inline void emit(const GlobalOpts& g, const std::string& text) {
    if (g.output == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(g.output, std::ios::binary);
    if (!out) throw ParseError("cannot open output '" + g.output + "'");
    out << text;
}

inline void emit_json(const GlobalOpts& g, const json& j) { emit(g, j.dump(2) + "\n"); }

// Inputs shared by tv / envelope / play / skorohod / oracle: a step function
// with either a constant symmetric band or band files.
struct BandedInput {
    std::string input_path;
    double c = 0.0;
    bool truncated = false;
    std::string alpha_path;
    std::string beta_path;
    std::string interval;

    void add_options(CLI::App* sub, bool band_required) {
        sub->add_option("--input", input_path, "step function (JSON or CSV samples)")
            ->required();
        sub->add_option("--c", c, "constant symmetric band width (boundaries -c/2, c/2)");
        sub->add_flag("--truncated", truncated, "compute the truncated variant (needs --c)");
        sub->add_option("--alpha", alpha_path, "lower boundary step function (JSON or CSV)");
        sub->add_option("--beta", beta_path, "upper boundary step function (JSON or CSV)");
        sub->add_option("--interval", interval, "time window 'a,b' (default: whole horizon)");
        if (band_required) {
            // enforced at run time so the diagnostics stay uniform
        }
    }

    bool has_constant_band() const { return c != 0.0 || truncated; }
    bool has_band_files() const { return !alpha_path.empty() || !beta_path.empty(); }

    StepFunction load_restricted() const {
        StepFunction f = load_step_function(input_path);
        if (interval.empty()) return f;
        return restrict_to(f, parse_interval(interval));
    }

    void validate_band() const {
        if (truncated && c == 0.0)
            throw InvalidSpec("--truncated requires --c > 0");
        if (has_constant_band() && has_band_files())
            throw InvalidSpec("--c and --alpha/--beta are mutually exclusive");
        if (!alpha_path.empty() != !beta_path.empty())
            throw InvalidSpec("--alpha and --beta must be given together");
        if (has_constant_band() && !(c > 0)) throw InvalidSpec("--c must be positive");
    }

    // restricted input with both boundaries on the common grid
    std::tuple<StepFunction, StepFunction, StepFunction> load_triple() const {
        StepFunction f = load_restricted();
        if (has_band_files()) {
            StepFunction a = load_step_function(alpha_path);
            StepFunction b = load_step_function(beta_path);
            if (!interval.empty()) {
                TimeInterval iv = parse_interval(interval);
                a = restrict_to(a, iv);
                b = restrict_to(b, iv);
            }
            auto r = common_refinement({f, a, b});
            return {r[0], r[1], r[2]};
        }
        const double half = c / 2;
        return {f,
                StepFunction(f.knots(), std::vector<double>(f.knot_count(), -half),
                             std::vector<double>(f.knot_count() - 1, -half)),
                StepFunction(f.knots(), std::vector<double>(f.knot_count(), half),
                             std::vector<double>(f.knot_count() - 1, half))};
    }
};

inline json final_values(const VariationProfile& p) {
    return json{{"tv", p.final_tv()}, {"utv", p.final_utv()}, {"dtv", p.final_dtv()}};
}

inline std::string tv_table(const VariationProfile& p) {
    std::ostringstream os;
    os << "tv " << p.final_tv() << "\nutv " << p.final_utv() << "\ndtv " << p.final_dtv()
       << "\n";
    return os.str();
}

inline VariationProfile banded_profile(const BandedInput& in) {
    in.validate_band();
    if (in.has_band_files()) {
        auto [f, a, b] = in.load_triple();
        return minimal_envelope(interleave(f, a, b)).profile;
    }
    StepFunction f = in.load_restricted();
    if (in.has_constant_band()) return tv_truncated(f, in.c);
    return total_variation(f);
}

inline int run_tv(const GlobalOpts& g, const BandedInput& in, bool profile) {
    VariationProfile p = banded_profile(in);
    if (g.format == "table") {
        emit(g, tv_table(p));
        return 0;
    }
    json j = final_values(p);
    if (profile) j["profile"] = to_json(p);
    emit_json(g, j);
    return 0;
}

inline int run_envelope(const GlobalOpts& g, const BandedInput& in) {
    in.validate_band();
    if (!in.has_constant_band() && !in.has_band_files())
        throw InvalidSpec("envelope needs --c or --alpha/--beta");
    auto [f, a, b] = in.load_triple();
    EnvelopeResult env = minimal_envelope(interleave(f, a, b));
    if (g.format == "table") {
        std::ostringstream os;
        os << "start " << env.start_value << "\nswitches " << env.switches.size() << "\ntv "
           << env.profile.final_tv() << "\n";
        emit(g, os.str());
        return 0;
    }
    emit_json(g, to_json(env));
    return 0;
}

inline PlayResult run_play_impl(const BandedInput& in, double xi0, const std::string& route) {
    in.validate_band();
    if (!in.has_constant_band() && !in.has_band_files())
        throw InvalidSpec("play needs --c or --alpha/--beta");
    auto [f, a, b] = in.load_triple();
    if (route == "recursion") return play_recursion(f, a, b, xi0);
    return play(f, a, b, xi0);
}

inline int run_play(const GlobalOpts& g, const BandedInput& in, double xi0,
                    const std::string& route) {
    PlayResult r = run_play_impl(in, xi0, route);
    if (g.format == "table") {
        VariationProfile p = total_variation(r.xi);
        std::ostringstream os;
        os << "start " << r.start << "\ntv " << p.final_tv() << "\nutv " << p.final_utv()
           << "\ndtv " << p.final_dtv() << "\n";
        emit(g, os.str());
        return 0;
    }
    emit_json(g, to_json(r));
    return 0;
}

inline int run_skorohod(const GlobalOpts& g, const BandedInput& in, double xi0) {
    PlayResult r = run_play_impl(in, xi0, "utv");
    auto [f, a, b] = in.load_triple();
    auto violations = skorohod_check(r, a, b, g.tol);
    if (g.format == "table") {
        std::ostringstream os;
        os << "violations " << violations.size() << "\n";
        for (const auto& v : violations) os << v.index << ' ' << v.kind << ' ' << v.gap << "\n";
        emit(g, os.str());
        return 0;
    }
    emit_json(g, to_json(violations));
    return 0;
}

struct RatesOpts {
    std::string process = "bm";
    double hurst = 0.5;
    double stable_alpha = 1.5;
    double horizon_T = 1.0;
    std::size_t n_steps = 1024;
    std::size_t replicates = 10;
    double c_min = 0.05;
    double c_max = 0.2;
    std::size_t c_points = 8;
    std::string dump_path;
    double lemma1_amp = 0.0;
    bool with_lemma1 = false;
};

inline int run_rates(const GlobalOpts& g, const RatesOpts& o) {
    PathSpec spec;
    if (o.process == "bm")
        spec.kind = ProcessKind::Brownian;
    else if (o.process == "fbm")
        spec.kind = ProcessKind::FractionalBrownian;
    else if (o.process == "stable")
        spec.kind = ProcessKind::StableLevy;
    else
        throw InvalidSpec("unknown process '" + o.process + "' (bm|fbm|stable)");
    spec.hurst = o.hurst;
    spec.stable_alpha = o.stable_alpha;
    spec.horizon_T = o.horizon_T;
    spec.n_steps = o.n_steps;
    spec.seed = g.seed;

    if (!o.dump_path.empty()) {
        std::ofstream out(o.dump_path, std::ios::binary);
        if (!out) throw ParseError("cannot open dump path '" + o.dump_path + "'");
        PathSpec first = spec;
        first.seed = rng::derive(spec.seed, 0);
        write_samples_csv(out, generate(first));
    }

    RateReport rep = estimate_rate(spec, o.c_min, o.c_max, o.c_points, o.replicates);
    for (const auto& w : rep.warnings) std::cerr << "warning: " << w << "\n";

    if (g.format == "table") {
        std::ostringstream os;
        os << "c tv_mean tv_stderr tv_median c_times_tv\n";
        for (std::size_t i = 0; i < rep.c_grid.size(); ++i)
            os << rep.c_grid[i] << ' ' << rep.tv_mean[i] << ' ' << rep.tv_stderr[i] << ' '
               << rep.tv_median[i] << ' ' << rep.c_times_tv[i] << "\n";
        os << "slope " << rep.slope << " +- " << rep.slope_ci << "\n";
        os << "slope_median " << rep.slope_median << "\n";
        emit(g, os.str());
        return 0;
    }
    json j = to_json(rep);
    if (o.with_lemma1) {
        Lemma1Result lem = lemma1_experiment(spec, o.lemma1_amp, rep.c_grid);
        j["lemma1"] = to_json(lem);
    }
    emit_json(g, j);
    return 0;
}

// Reruns the banded computation through the quadratic reference path and
// diffs the final values against the fast sweep.
inline int run_oracle(const GlobalOpts& g, const BandedInput& in) {
    in.validate_band();
    VariationProfile fast = banded_profile(in);

    double otv, outv, odtv;
    if (in.has_band_files()) {
        auto [f, a, b] = in.load_triple();
        DiscreteTriple tri = interleave(f, a, b);
        otv = ab_trunc_oracle(tri, 0, tri.size() - 1, VarMode::TV);
        outv = ab_trunc_oracle(tri, 0, tri.size() - 1, VarMode::UTV);
        odtv = ab_trunc_oracle(tri, 0, tri.size() - 1, VarMode::DTV);
    } else {
        StepFunction f = in.load_restricted();
        TimeInterval iv(f.start_time(), f.end_time());
        const double c = in.has_constant_band() ? in.c : 0.0;
        otv = tv_trunc_oracle(f, c, iv, VarMode::TV);
        outv = tv_trunc_oracle(f, c, iv, VarMode::UTV);
        odtv = tv_trunc_oracle(f, c, iv, VarMode::DTV);
    }

    double max_diff = std::abs(fast.final_tv() - otv);
    max_diff = std::max(max_diff, std::abs(fast.final_utv() - outv));
    max_diff = std::max(max_diff, std::abs(fast.final_dtv() - odtv));

    json j{{"fast", final_values(fast)},
           {"oracle", json{{"tv", otv}, {"utv", outv}, {"dtv", odtv}}},
           {"max_abs_diff", max_diff},
           {"tol", g.tol}};
    emit_json(g, j);
    return max_diff > g.tol ? 3 : 0;
}

} // namespace detail

/// Dispatches one invocation; args excludes the program name. Returns the
/// process exit code: 0 success, 2 validation failure, 3 oracle mismatch,
/// 1 internal error.
inline int run(const std::vector<std::string>& args) {
    detail::GlobalOpts g;
    if (const char* env = std::getenv("TRUNCVAR_SEED")) g.seed = std::strtoull(env, nullptr, 10);

    CLI::App app{"truncated variation, minimal-variation envelopes and the play operator "
                 "for step functions"};
    app.require_subcommand(1);
    app.add_option("--seed", g.seed, "RNG seed (fallback: TRUNCVAR_SEED)");
    app.add_option("--tol", g.tol, "tolerance for cross-route diffs");
    app.add_option("--output", g.output, "output path, '-' for stdout");
    app.add_option("--format", g.format, "json|table")
        ->check(CLI::IsMember({"json", "table"}));

    detail::BandedInput tv_in;
    bool tv_profile = false;
    CLI::App* tv = app.add_subcommand("tv", "total or truncated variation of a step function");
    tv_in.add_options(tv, false);
    tv->add_flag("--profile", tv_profile, "emit the running profile too");

    detail::BandedInput env_in;
    CLI::App* envelope =
        app.add_subcommand("envelope", "minimal-variation envelope inside a band");
    env_in.add_options(envelope, true);

    detail::BandedInput play_in;
    double play_xi0 = 0.0;
    std::string play_route = "utv";
    CLI::App* playc = app.add_subcommand("play", "play operator output and Jordan parts");
    play_in.add_options(playc, true);
    playc->add_option("--xi0", play_xi0, "starting value")->required();
    playc->add_option("--route", play_route, "utv|recursion")
        ->check(CLI::IsMember({"utv", "recursion"}));

    detail::BandedInput sk_in;
    double sk_xi0 = 0.0;
    CLI::App* skorohod =
        app.add_subcommand("skorohod", "contact-set diagnostics of a play output");
    sk_in.add_options(skorohod, true);
    skorohod->add_option("--xi0", sk_xi0, "starting value")->required();

    detail::RatesOpts ro;
    CLI::App* rates = app.add_subcommand("rates", "Monte Carlo growth of TV^c as c decreases");
    rates->add_option("--process", ro.process, "bm|fbm|stable")->required();
    rates->add_option("--hurst", ro.hurst, "Hurst parameter (fbm)");
    rates->add_option("--alpha", ro.stable_alpha, "stability index (stable)");
    rates->add_option("--T", ro.horizon_T, "horizon");
    rates->add_option("--n", ro.n_steps, "steps per path");
    rates->add_option("--paths,--replicates", ro.replicates, "number of paths");
    rates->add_option("--c-min", ro.c_min, "smallest c");
    rates->add_option("--c-max", ro.c_max, "largest c");
    rates->add_option("--c-points", ro.c_points, "grid size");
    rates->add_option("--dump-path", ro.dump_path, "write the first path as CSV");
    rates->add_option("--lemma1-amp", ro.lemma1_amp, "sinusoid amplitude for the rate-sum table");

    detail::BandedInput or_in;
    CLI::App* oracle =
        app.add_subcommand("oracle", "diff the fast sweep against the brute-force reference");
    or_in.add_options(oracle, false);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

    ro.with_lemma1 = rates->count("--lemma1-amp") > 0;

    try {
        if (tv->parsed()) return detail::run_tv(g, tv_in, tv_profile);
        if (envelope->parsed()) return detail::run_envelope(g, env_in);
        if (playc->parsed()) return detail::run_play(g, play_in, play_xi0, play_route);
        if (skorohod->parsed()) return detail::run_skorohod(g, sk_in, sk_xi0);
        if (rates->parsed()) return detail::run_rates(g, ro);
        if (oracle->parsed()) return detail::run_oracle(g, or_in);
        std::cerr << "no subcommand\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace truncvar::cli
