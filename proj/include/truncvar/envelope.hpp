#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "truncvar/errors.hpp"
#include "truncvar/step_function.hpp"
#include "truncvar/variation.hpp"

namespace truncvar {

enum class Direction { Up, Down };
enum class StartBranch { Up, Down, Flat };

struct EnvelopeSwitch {
    std::size_t index;
    Direction direction;
};

/// Minimal-variation envelope of a triple: the feasible path of least total
/// variation on every prefix, its running variation profile, the realised
/// switch indices and the forward-looking starting value.
struct EnvelopeResult {
    StepFunction envelope;
    VariationProfile profile;
    std::vector<EnvelopeSwitch> switches;
    StartBranch branch;
    double start_value;
};

namespace detail {

struct EnvelopeCore {
    std::vector<double> values;
    std::vector<EnvelopeSwitch> switches;
    StartBranch branch = StartBranch::Flat;
    double start_value = 0.0;
};

// Two-pass sweep over the tracks upper = psi - alpha, lower = psi - beta.
// Pass 1 locates the switch indices with running extrema; pass 2 fills the
// envelope values segment by segment. The envelope is constant before the
// first switch, a running maximum of `lower` on up segments and a running
// minimum of `upper` on down segments.
inline EnvelopeCore envelope_core(std::span<const double> upper, std::span<const double> lower) {
    const std::size_t n = upper.size();
    EnvelopeCore out;
    out.values.assign(n, 0.0);

    constexpr double inf = std::numeric_limits<double>::infinity();

    // Pass 1: first switch. The prefix extrema are taken strictly before the
    // candidate index; including the index itself cannot trigger because
    // lower <= upper pointwise. An up and a down trigger can never first
    // happen at the same index, but up is checked first to keep the
    // branch choice deterministic.
    double pre_min_upper = inf;
    double pre_max_lower = -inf;
    std::size_t first = n;
    Direction first_dir = Direction::Up;
    for (std::size_t j = 0; j < n; ++j) {
        if (lower[j] > pre_min_upper) {
            first = j;
            first_dir = Direction::Up;
            break;
        }
        if (upper[j] < pre_max_lower) {
            first = j;
            first_dir = Direction::Down;
            break;
        }
        if (upper[j] < pre_min_upper) pre_min_upper = upper[j];
        if (lower[j] > pre_max_lower) pre_max_lower = lower[j];
    }

    if (first == n) {
        out.branch = StartBranch::Flat;
        out.start_value = pre_min_upper; // min of upper over the whole horizon
        for (std::size_t i = 0; i < n; ++i) out.values[i] = out.start_value;
        return out;
    }

    // Remaining switches. Each segment scan resumes where the previous one
    // stopped, so the whole pass stays linear.
    out.switches.push_back({first, first_dir});
    {
        std::size_t seg = first;
        Direction dir = first_dir;
        while (true) {
            std::size_t next = n;
            if (dir == Direction::Up) {
                double run_max = -inf; // max of lower over [seg; j]
                for (std::size_t j = seg; j < n; ++j) {
                    if (lower[j] > run_max) run_max = lower[j];
                    if (run_max > upper[j]) {
                        next = j;
                        break;
                    }
                }
            } else {
                double run_min = inf; // min of upper over [seg; j]
                for (std::size_t j = seg; j < n; ++j) {
                    if (upper[j] < run_min) run_min = upper[j];
                    if (run_min < lower[j]) {
                        next = j;
                        break;
                    }
                }
            }
            if (next == n) break;
            dir = (dir == Direction::Up) ? Direction::Down : Direction::Up;
            out.switches.push_back({next, dir});
            seg = next;
        }
    }

    out.branch = (first_dir == Direction::Up) ? StartBranch::Up : StartBranch::Down;
    out.start_value = (first_dir == Direction::Up) ? pre_min_upper : pre_max_lower;

    // Pass 2: fill values.
    for (std::size_t i = 0; i < first; ++i) out.values[i] = out.start_value;
    for (std::size_t s = 0; s < out.switches.size(); ++s) {
        const std::size_t begin = out.switches[s].index;
        const std::size_t end = (s + 1 < out.switches.size()) ? out.switches[s + 1].index : n;
        if (out.switches[s].direction == Direction::Up) {
            double run_max = -inf;
            for (std::size_t i = begin; i < end; ++i) {
                if (lower[i] > run_max) run_max = lower[i];
                out.values[i] = run_max;
            }
        } else {
            double run_min = inf;
            for (std::size_t i = begin; i < end; ++i) {
                if (upper[i] < run_min) run_min = upper[i];
                out.values[i] = run_min;
            }
        }
    }
    return out;
}

inline std::vector<double> upper_track(const DiscreteTriple& tri) {
    std::vector<double> a(tri.size());
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = tri.psi()[i] - tri.alpha()[i];
    return a;
}

inline std::vector<double> lower_track(const DiscreteTriple& tri) {
    std::vector<double> b(tri.size());
    for (std::size_t i = 0; i < b.size(); ++i) b[i] = tri.psi()[i] - tri.beta()[i];
    return b;
}

} // namespace detail

/// First index where the input breaks out of the band upward resp. downward:
/// iu0 = min{ j : min_{k<=j}(psi_k - alpha_k) < psi_j - beta_j },
/// id0 = min{ j : max_{k<=j}(psi_k - beta_k) > psi_j - alpha_j }.
inline std::pair<std::optional<std::size_t>, std::optional<std::size_t>> switching_indices(
    const DiscreteTriple& tri) {
    const std::vector<double> upper = detail::upper_track(tri);
    const std::vector<double> lower = detail::lower_track(tri);
    constexpr double inf = std::numeric_limits<double>::infinity();

    std::optional<std::size_t> iu0, id0;
    double run_min_upper = inf;
    double run_max_lower = -inf;
    for (std::size_t j = 0; j < tri.size(); ++j) {
        if (upper[j] < run_min_upper) run_min_upper = upper[j];
        if (lower[j] > run_max_lower) run_max_lower = lower[j];
        if (!iu0 && run_min_upper < lower[j]) iu0 = j;
        if (!id0 && run_max_lower > upper[j]) id0 = j;
        if (iu0 && id0) break;
    }
    return {iu0, id0};
}

struct OptimalStart {
    double value;
    StartBranch branch;
};

/// Forward-looking optimal starting value: the running extremum of the track
/// that is about to be broken first, taken up to that first break.
inline OptimalStart optimal_start(const DiscreteTriple& tri) {
    const std::vector<double> upper = detail::upper_track(tri);
    const std::vector<double> lower = detail::lower_track(tri);
    constexpr double inf = std::numeric_limits<double>::infinity();

    double run_min_upper = inf;
    double run_max_lower = -inf;
    for (std::size_t j = 0; j < tri.size(); ++j) {
        if (upper[j] < run_min_upper) run_min_upper = upper[j];
        if (lower[j] > run_max_lower) run_max_lower = lower[j];
        if (run_min_upper < lower[j]) return {run_min_upper, StartBranch::Up};
        if (run_max_lower > upper[j]) return {run_max_lower, StartBranch::Down};
    }
    return {run_min_upper, StartBranch::Flat};
}

/// The full fast construction: envelope values, running variation profile
/// and switch structure, in two linear passes.
inline EnvelopeResult minimal_envelope(const DiscreteTriple& tri) {
    const std::vector<double> upper = detail::upper_track(tri);
    const std::vector<double> lower = detail::lower_track(tri);
    detail::EnvelopeCore core = detail::envelope_core(upper, lower);
    return {step_from_interleaved(tri.knots(), core.values),
            detail::profile_from_values(tri.knots(), core.values), std::move(core.switches),
            core.branch, core.start_value};
}

/// Running TV^c/UTV^c/DTV^c profile of f over iv via the envelope with the
/// constant band (-c/2; c/2).
inline VariationProfile tv_truncated(const StepFunction& f, double c, const TimeInterval& iv) {
    if (!(c > 0)) throw InvalidSpec("tv_truncated requires c > 0");
    StepFunction g = restrict_to(f, iv);
    const std::size_t n = 2 * g.knot_count() - 1;
    const std::vector<double> x = g.interleaved();
    std::vector<double> upper(n), lower(n);
    for (std::size_t i = 0; i < n; ++i) {
        upper[i] = x[i] + c / 2;
        lower[i] = x[i] - c / 2;
    }
    detail::EnvelopeCore core = detail::envelope_core(upper, lower);
    return detail::profile_from_values(g.knots(), core.values);
}

inline VariationProfile tv_truncated(const StepFunction& f, double c) {
    if (f.single_point()) {
        VariationProfile p;
        p.times = {{true, f.start_time(), f.start_time()}};
        p.tv = {0.0};
        p.utv = {0.0};
        p.dtv = {0.0};
        return p;
    }
    return tv_truncated(f, c, TimeInterval(f.start_time(), f.end_time()));
}

} // namespace truncvar
