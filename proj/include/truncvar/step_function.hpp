#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "truncvar/errors.hpp"

namespace truncvar {

/// Closed time interval [a; b] with a < b, both finite.
struct TimeInterval {
    double a;
    double b;

    TimeInterval(double a, double b) : a(a), b(b) {
        if (!std::isfinite(a) || !std::isfinite(b))
            throw NonFiniteValue("interval endpoints must be finite");
        if (!(a < b))
            throw OutOfDomain("interval requires a < b, got [" + std::to_string(a) + "; " +
                              std::to_string(b) + "]");
    }
};

/// One-dimensional regulated step function on a finite horizon.
///
/// Stored as knots t_0 < t_1 < ... < t_K together with the value AT each
/// knot and the constant value ON each open interval (t_k; t_{k+1}).
/// A single-knot function (K = 0) is a point constant.
/// Values are immutable after construction.
class StepFunction {
public:
    StepFunction(std::vector<double> knots, std::vector<double> point_values,
                 std::vector<double> interval_values)
        : knots_(std::move(knots)),
          point_values_(std::move(point_values)),
          interval_values_(std::move(interval_values)) {
        if (knots_.empty())
            throw LengthMismatch("step function needs at least one knot");
        if (point_values_.size() != knots_.size())
            throw LengthMismatch("point_values size " + std::to_string(point_values_.size()) +
                                 " != knots size " + std::to_string(knots_.size()));
        if (interval_values_.size() + 1 != knots_.size())
            throw LengthMismatch("interval_values size " + std::to_string(interval_values_.size()) +
                                 " != knots size - 1");
        for (std::size_t k = 1; k < knots_.size(); ++k)
            if (!(knots_[k - 1] < knots_[k]))
                throw NonIncreasingTimes("knots must be strictly increasing at position " +
                                         std::to_string(k));
        for (double t : knots_)
            if (!std::isfinite(t)) throw NonFiniteValue("knot time not finite");
        for (double v : point_values_)
            if (!std::isfinite(v)) throw NonFiniteValue("point value not finite");
        for (double v : interval_values_)
            if (!std::isfinite(v)) throw NonFiniteValue("interval value not finite");
    }

    /// Constant function on [a; b].
    static StepFunction constant(double a, double b, double value) {
        if (!(a < b)) throw OutOfDomain("constant() requires a < b");
        return StepFunction({a, b}, {value, value}, {value});
    }

    const std::vector<double>& knots() const noexcept { return knots_; }
    const std::vector<double>& point_values() const noexcept { return point_values_; }
    const std::vector<double>& interval_values() const noexcept { return interval_values_; }

    double start_time() const noexcept { return knots_.front(); }
    double end_time() const noexcept { return knots_.back(); }
    std::size_t knot_count() const noexcept { return knots_.size(); }

    bool single_point() const noexcept { return knots_.size() == 1; }

    /// Value at time t: the knot value when t is a knot, the interval value
    /// when t lies strictly inside an inter-knot interval.
    double evaluate(double t) const {
        if (!(t >= start_time() && t <= end_time()))
            throw OutOfDomain("t = " + std::to_string(t) + " outside horizon [" +
                              std::to_string(start_time()) + "; " + std::to_string(end_time()) +
                              "]");
        auto it = std::lower_bound(knots_.begin(), knots_.end(), t);
        std::size_t k = static_cast<std::size_t>(it - knots_.begin());
        if (it != knots_.end() && *it == t) return point_values_[k];
        // t strictly inside (t_{k-1}; t_k)
        return interval_values_[k - 1];
    }

    double operator()(double t) const { return evaluate(t); }

    /// Interleaved value sequence v_0, w_0, v_1, w_1, ..., v_K (length 2K+1).
    std::vector<double> interleaved() const {
        std::vector<double> out;
        out.reserve(2 * knots_.size() - 1);
        for (std::size_t k = 0; k + 1 < knots_.size(); ++k) {
            out.push_back(point_values_[k]);
            out.push_back(interval_values_[k]);
        }
        out.push_back(point_values_.back());
        return out;
    }

    bool same_grid(const StepFunction& other) const { return knots_ == other.knots_; }

    bool operator==(const StepFunction& other) const {
        return knots_ == other.knots_ && point_values_ == other.point_values_ &&
               interval_values_ == other.interval_values_;
    }

private:
    std::vector<double> knots_;
    std::vector<double> point_values_;
    std::vector<double> interval_values_;
};

/// Right-continuous step function through the given samples: the value at
/// each sample time is held on the following open interval.
inline StepFunction from_samples(const std::vector<double>& times,
                                 const std::vector<double>& values) {
    if (times.size() != values.size())
        throw LengthMismatch("times size " + std::to_string(times.size()) + " != values size " +
                             std::to_string(values.size()));
    if (times.size() < 2) throw LengthMismatch("need at least two samples");
    for (std::size_t k = 1; k < times.size(); ++k)
        if (!(times[k - 1] < times[k]))
            throw NonIncreasingTimes("sample times must be strictly increasing at position " +
                                     std::to_string(k));
    for (double v : values)
        if (!std::isfinite(v)) throw NonFiniteValue("sample value not finite");
    std::vector<double> intervals(values.begin(), values.end() - 1);
    return StepFunction(times, values, std::move(intervals));
}

/// Re-expresses each input on the sorted union of all knot sets.
/// Outputs are pointwise equal to the inputs; idempotent.
inline std::vector<StepFunction> common_refinement(const std::vector<StepFunction>& fs) {
    if (fs.empty()) return {};
    const double a = fs.front().start_time();
    const double b = fs.front().end_time();
    for (const auto& f : fs)
        if (f.start_time() != a || f.end_time() != b)
            throw HorizonMismatch("horizons differ: [" + std::to_string(a) + "; " +
                                  std::to_string(b) + "] vs [" + std::to_string(f.start_time()) +
                                  "; " + std::to_string(f.end_time()) + "]");

    std::vector<double> merged;
    for (const auto& f : fs) merged.insert(merged.end(), f.knots().begin(), f.knots().end());
    std::sort(merged.begin(), merged.end());
    merged.erase(std::unique(merged.begin(), merged.end()), merged.end());

    std::vector<StepFunction> out;
    out.reserve(fs.size());
    for (const auto& f : fs) {
        std::vector<double> pv(merged.size());
        std::vector<double> iv(merged.empty() ? 0 : merged.size() - 1);
        for (std::size_t k = 0; k < merged.size(); ++k) pv[k] = f.evaluate(merged[k]);
        for (std::size_t k = 0; k + 1 < merged.size(); ++k) {
            // any point strictly inside (m_k; m_{k+1}) sees the old interval value
            double mid = merged[k] + (merged[k + 1] - merged[k]) / 2;
            iv[k] = f.evaluate(mid);
        }
        out.emplace_back(merged, std::move(pv), std::move(iv));
    }
    return out;
}

/// Restriction of f to [iv.a; iv.b]. Endpoints become knots carrying the
/// regulated value of f there; no snapping to nearby knots.
inline StepFunction restrict_to(const StepFunction& f, const TimeInterval& iv) {
    if (!(iv.a >= f.start_time() && iv.b <= f.end_time()))
        throw OutOfDomain("interval [" + std::to_string(iv.a) + "; " + std::to_string(iv.b) +
                          "] outside horizon");
    std::vector<double> knots;
    knots.push_back(iv.a);
    for (double t : f.knots())
        if (t > iv.a && t < iv.b) knots.push_back(t);
    knots.push_back(iv.b);

    std::vector<double> pv(knots.size());
    std::vector<double> ivals(knots.size() - 1);
    for (std::size_t k = 0; k < knots.size(); ++k) pv[k] = f.evaluate(knots[k]);
    for (std::size_t k = 0; k + 1 < knots.size(); ++k)
        ivals[k] = f.evaluate(knots[k] + (knots[k + 1] - knots[k]) / 2);
    return StepFunction(std::move(knots), std::move(pv), std::move(ivals));
}

/// Label for one interleaved index: a knot time or an open inter-knot interval.
struct TimeLabel {
    bool is_knot;
    double t0; // knot time, or interval start
    double t1; // interval end (== t0 for knots)
};

inline std::vector<TimeLabel> interleaved_labels(const std::vector<double>& knots) {
    std::vector<TimeLabel> out;
    out.reserve(2 * knots.size() - 1);
    for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
        out.push_back({true, knots[k], knots[k]});
        out.push_back({false, knots[k], knots[k + 1]});
    }
    out.push_back({true, knots.back(), knots.back()});
    return out;
}

/// Interleaved (psi_i, alpha_i, beta_i) sequences on a common knot grid.
/// All three lists have odd length 2K+1 and alpha_i <= beta_i everywhere.
class DiscreteTriple {
public:
    DiscreteTriple(std::vector<double> knots, std::vector<double> psi, std::vector<double> alpha,
                   std::vector<double> beta)
        : knots_(std::move(knots)),
          psi_(std::move(psi)),
          alpha_(std::move(alpha)),
          beta_(std::move(beta)) {
        if (psi_.size() != alpha_.size() || psi_.size() != beta_.size())
            throw LengthMismatch("triple sequences must have equal length");
        if (psi_.size() % 2 == 0 || psi_.empty())
            throw LengthMismatch("triple length must be odd (2K+1), got " +
                                 std::to_string(psi_.size()));
        if (psi_.size() != 2 * knots_.size() - 1)
            throw LengthMismatch("triple length " + std::to_string(psi_.size()) +
                                 " does not match knot count " + std::to_string(knots_.size()));
        for (std::size_t i = 0; i < psi_.size(); ++i) {
            if (!std::isfinite(psi_[i]) || !std::isfinite(alpha_[i]) || !std::isfinite(beta_[i]))
                throw NonFiniteValue("triple value not finite at index " + std::to_string(i));
            if (alpha_[i] > beta_[i])
                throw BoundaryOrderViolation(i, "alpha > beta at interleaved index " +
                                                    std::to_string(i));
        }
    }

    const std::vector<double>& knots() const noexcept { return knots_; }
    const std::vector<double>& psi() const noexcept { return psi_; }
    const std::vector<double>& alpha() const noexcept { return alpha_; }
    const std::vector<double>& beta() const noexcept { return beta_; }
    std::size_t size() const noexcept { return psi_.size(); }

    std::vector<TimeLabel> times() const { return interleaved_labels(knots_); }

private:
    std::vector<double> knots_;
    std::vector<double> psi_;
    std::vector<double> alpha_;
    std::vector<double> beta_;
};

/// Zips three grid-aligned step functions into a DiscreteTriple.
/// All three must already live on the same knot grid.
inline DiscreteTriple interleave(const StepFunction& f, const StepFunction& alpha,
                                 const StepFunction& beta) {
    if (!f.same_grid(alpha) || !f.same_grid(beta))
        throw HorizonMismatch("interleave requires a shared knot grid; refine first");
    return DiscreteTriple(f.knots(), f.interleaved(), alpha.interleaved(), beta.interleaved());
}

/// Rebuilds the interleaved sequence of a triple as a StepFunction on its grid.
inline StepFunction step_from_interleaved(const std::vector<double>& knots,
                                          const std::vector<double>& seq) {
    if (seq.size() != 2 * knots.size() - 1)
        throw LengthMismatch("interleaved length does not match knot count");
    std::vector<double> pv(knots.size());
    std::vector<double> iv(knots.size() - 1);
    for (std::size_t k = 0; k < knots.size(); ++k) pv[k] = seq[2 * k];
    for (std::size_t k = 0; k + 1 < knots.size(); ++k) iv[k] = seq[2 * k + 1];
    return StepFunction(knots, std::move(pv), std::move(iv));
}

/// Inverse of interleave.
inline std::tuple<StepFunction, StepFunction, StepFunction> deinterleave(
    const DiscreteTriple& tri) {
    return {step_from_interleaved(tri.knots(), tri.psi()),
            step_from_interleaved(tri.knots(), tri.alpha()),
            step_from_interleaved(tri.knots(), tri.beta())};
}

/// Symmetrised input and band width: psi_tilde = psi - (alpha+beta)/2,
/// gamma = beta - alpha >= 0.
inline std::pair<StepFunction, StepFunction> symmetrize(const StepFunction& psi,
                                                        const StepFunction& alpha,
                                                        const StepFunction& beta) {
    DiscreteTriple tri = interleave(psi, alpha, beta);
    const std::size_t n = tri.size();
    std::vector<double> tilde(n), gamma(n);
    for (std::size_t i = 0; i < n; ++i) {
        tilde[i] = tri.psi()[i] - 0.5 * (tri.alpha()[i] + tri.beta()[i]);
        gamma[i] = tri.beta()[i] - tri.alpha()[i];
    }
    return {step_from_interleaved(tri.knots(), tilde), step_from_interleaved(tri.knots(), gamma)};
}

struct ShiftedStart {
    StepFunction u_shifted;
    StepFunction alpha0;
    StepFunction beta0;
};

/// Imposes the starting value: u_shifted(t_0) = xi0 with the band collapsed
/// to {0} at t_0; everything after t_0 is untouched.
inline ShiftedStart shift_for_start(const StepFunction& u, const StepFunction& alpha,
                                    const StepFunction& beta, double xi0) {
    if (!u.same_grid(alpha) || !u.same_grid(beta))
        throw HorizonMismatch("shift_for_start requires a shared knot grid");
    const double u0 = u.point_values().front();
    const double lo = u0 - beta.point_values().front();
    const double hi = u0 - alpha.point_values().front();
    if (!(xi0 >= lo && xi0 <= hi))
        throw StartOutOfBand(lo, hi,
                             "xi0 = " + std::to_string(xi0) + " outside admissible interval [" +
                                 std::to_string(lo) + "; " + std::to_string(hi) + "]");

    std::vector<double> upv = u.point_values();
    std::vector<double> apv = alpha.point_values();
    std::vector<double> bpv = beta.point_values();
    upv.front() = xi0;
    apv.front() = 0.0;
    bpv.front() = 0.0;
    return {StepFunction(u.knots(), std::move(upv), u.interval_values()),
            StepFunction(u.knots(), std::move(apv), alpha.interval_values()),
            StepFunction(u.knots(), std::move(bpv), beta.interval_values())};
}

} // namespace truncvar
