#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "truncvar/envelope.hpp"
#include "truncvar/errors.hpp"
#include "truncvar/step_function.hpp"
#include "truncvar/variation.hpp"

namespace truncvar {

/// Output of the play operator together with its Jordan parts.
/// xi = start + xi_u - xi_d pointwise, xi_u/xi_d nondecreasing from 0,
/// and phi = u - xi stays inside [alpha; beta].
struct PlayResult {
    StepFunction xi;
    StepFunction xi_u;
    StepFunction xi_d;
    StepFunction phi;
    double start;
};

struct PlayInput {
    StepFunction u;
    StepFunction alpha;
    StepFunction beta;
    double xi0;
};

/// One-step clamp: min{ max{u - beta, xi_prev}, u - alpha }. The result is
/// the feasible value closest to xi_prev.
inline double one_step(double xi_prev, double u_i, double alpha_i, double beta_i) {
    if (alpha_i > beta_i) throw BoundaryOrderViolation(0, "alpha > beta in one_step");
    return std::min(std::max(u_i - beta_i, xi_prev), u_i - alpha_i);
}

namespace detail {

struct PreparedPlay {
    std::vector<double> knots;
    std::vector<double> u;     // interleaved input, unshifted
    std::vector<double> alpha; // interleaved boundaries
    std::vector<double> beta;
    double xi0;
};

inline PreparedPlay prepare_play(const StepFunction& u, const StepFunction& alpha,
                                 const StepFunction& beta, double xi0) {
    auto fs = common_refinement({u, alpha, beta});
    DiscreteTriple tri = interleave(fs[0], fs[1], fs[2]); // checks alpha <= beta
    const double u0 = tri.psi().front();
    const double lo = u0 - tri.beta().front();
    const double hi = u0 - tri.alpha().front();
    if (!(xi0 >= lo && xi0 <= hi))
        throw StartOutOfBand(lo, hi,
                             "xi0 = " + std::to_string(xi0) + " outside admissible interval [" +
                                 std::to_string(lo) + "; " + std::to_string(hi) + "]");
    return {tri.knots(), tri.psi(), tri.alpha(), tri.beta(), xi0};
}

inline PlayResult result_from_values(const PreparedPlay& prep, std::vector<double> xi_values) {
    const std::size_t n = prep.u.size();
    VariationProfile prof = profile_from_values(prep.knots, xi_values);
    std::vector<double> phi(n);
    for (std::size_t i = 0; i < n; ++i) phi[i] = prep.u[i] - xi_values[i];
    return {step_from_interleaved(prep.knots, xi_values),
            step_from_interleaved(prep.knots, prof.utv),
            step_from_interleaved(prep.knots, prof.dtv), step_from_interleaved(prep.knots, phi),
            prep.xi0};
}

} // namespace detail

/// Play operator via the minimal-variation envelope of the start-shifted
/// input: the band collapses to the point xi0 at the first instant, which
/// pins the envelope's starting value.
inline PlayResult play(const StepFunction& u, const StepFunction& alpha, const StepFunction& beta,
                       double xi0) {
    detail::PreparedPlay prep = detail::prepare_play(u, alpha, beta, xi0);
    const std::size_t n = prep.u.size();
    std::vector<double> upper(n), lower(n);
    upper[0] = prep.xi0; // shifted start: u(0) = xi0, band {0}
    lower[0] = prep.xi0;
    for (std::size_t i = 1; i < n; ++i) {
        upper[i] = prep.u[i] - prep.alpha[i];
        lower[i] = prep.u[i] - prep.beta[i];
    }
    detail::EnvelopeCore core = detail::envelope_core(upper, lower);
    return detail::result_from_values(prep, std::move(core.values));
}

/// Play operator via the greedy one-step recursion. Coincides with play()
/// exactly on step inputs.
inline PlayResult play_recursion(const StepFunction& u, const StepFunction& alpha,
                                 const StepFunction& beta, double xi0) {
    detail::PreparedPlay prep = detail::prepare_play(u, alpha, beta, xi0);
    const std::size_t n = prep.u.size();
    std::vector<double> xi(n);
    xi[0] = prep.xi0;
    for (std::size_t i = 1; i < n; ++i)
        xi[i] = std::min(std::max(prep.u[i] - prep.beta[i], xi[i - 1]),
                         prep.u[i] - prep.alpha[i]);
    return detail::result_from_values(prep, std::move(xi));
}

/// Constant symmetric band (-c/2; c/2).
inline PlayResult play_constant(const StepFunction& u, double c, double xi0) {
    if (!(c > 0)) throw InvalidSpec("play_constant requires c > 0");
    StepFunction alpha = StepFunction(u.knots(), std::vector<double>(u.knot_count(), -c / 2),
                                      std::vector<double>(u.knot_count() - 1, -c / 2));
    StepFunction beta = StepFunction(u.knots(), std::vector<double>(u.knot_count(), c / 2),
                                     std::vector<double>(u.knot_count() - 1, c / 2));
    return play(u, alpha, beta, xi0);
}

struct LipschitzGap {
    double lhs; // sup-norm distance of the two outputs
    double rhs; // max{ |xi0_1 - xi0_2|, ||a1-a2|| + ||b1-b2|| + ||u1-u2|| }
};

namespace detail {

inline double sup_distance(const StepFunction& f, const StepFunction& g) {
    auto r = common_refinement({f, g});
    const std::vector<double> xf = r[0].interleaved();
    const std::vector<double> xg = r[1].interleaved();
    double m = 0.0;
    for (std::size_t i = 0; i < xf.size(); ++i) m = std::max(m, std::abs(xf[i] - xg[i]));
    return m;
}

} // namespace detail

/// Evaluates both sides of the sup-norm stability bound of the play
/// operator; the contract is lhs <= rhs.
inline LipschitzGap lipschitz_gap(const PlayInput& in1, const PlayInput& in2) {
    PlayResult r1 = play(in1.u, in1.alpha, in1.beta, in1.xi0);
    PlayResult r2 = play(in2.u, in2.alpha, in2.beta, in2.xi0);
    const double lhs = detail::sup_distance(r1.xi, r2.xi);
    const double rhs = std::max(std::abs(in1.xi0 - in2.xi0),
                                detail::sup_distance(in1.alpha, in2.alpha) +
                                    detail::sup_distance(in1.beta, in2.beta) +
                                    detail::sup_distance(in1.u, in2.u));
    return {lhs, rhs};
}

/// Restarting the play operator at an interior knot from the attained value
/// must reproduce the tail exactly.
inline bool semigroup_check(const StepFunction& u, const StepFunction& alpha,
                            const StepFunction& beta, double xi0, double t_mid) {
    auto fs = common_refinement({u, alpha, beta});
    const auto& knots = fs[0].knots();
    const bool is_knot = std::binary_search(knots.begin(), knots.end(), t_mid);
    if (!is_knot || t_mid <= knots.front() || t_mid >= knots.back())
        throw KnotRequired("t_mid = " + std::to_string(t_mid) +
                           " must be an interior knot of the common grid");

    PlayResult full = play(fs[0], fs[1], fs[2], xi0);
    const double xi_mid = full.xi.evaluate(t_mid);

    TimeInterval tail_iv(t_mid, knots.back());
    PlayResult tail = play(restrict_to(fs[0], tail_iv), restrict_to(fs[1], tail_iv),
                           restrict_to(fs[2], tail_iv), xi_mid);
    return restrict_to(full.xi, tail_iv) == tail.xi;
}

struct SkorohodViolation {
    std::size_t index;
    std::string kind;
    double gap;
};

/// Contact-set diagnostic for a play output: every increase of xi_u must
/// land where phi touches beta, every increase of xi_d where phi touches
/// alpha, and the two parts may never grow at the same index.
inline std::vector<SkorohodViolation> skorohod_check(const PlayResult& result,
                                                     const StepFunction& alpha,
                                                     const StepFunction& beta,
                                                     double tol = 1e-9) {
    auto r = common_refinement({result.xi_u, result.xi_d, result.phi, alpha, beta});
    const std::vector<double> xiu = r[0].interleaved();
    const std::vector<double> xid = r[1].interleaved();
    const std::vector<double> phi = r[2].interleaved();
    const std::vector<double> a = r[3].interleaved();
    const std::vector<double> b = r[4].interleaved();

    std::vector<SkorohodViolation> out;
    for (std::size_t i = 1; i < xiu.size(); ++i) {
        const double du = xiu[i] - xiu[i - 1];
        const double dd = xid[i] - xid[i - 1];
        if (du > 0 && std::abs(phi[i] - b[i]) > tol)
            out.push_back({i, "xi_u increases off the upper boundary", std::abs(phi[i] - b[i])});
        if (dd > 0 && std::abs(phi[i] - a[i]) > tol)
            out.push_back({i, "xi_d increases off the lower boundary", std::abs(phi[i] - a[i])});
        if (du > 0 && dd > 0)
            out.push_back({i, "xi_u and xi_d increase simultaneously", std::min(du, dd)});
    }
    return out;
}

struct Vec2 {
    double x;
    double y;
};

inline double dist2(const Vec2& p, const Vec2& q) {
    return std::sqrt((p.x - q.x) * (p.x - q.x) + (p.y - q.y) * (p.y - q.y));
}

struct Counterexample2D {
    std::vector<Vec2> input;  // interleaved over knots {0, 1, 2}
    std::vector<Vec2> greedy; // greedy one-step output
    std::vector<Vec2> better; // feasible competitor with smaller variation
    double tv_greedy;
    double tv_better;
};

/// Fixed planar fixture showing the greedy one-step rule is not variation
/// minimal in two dimensions: with the unit-ball band the greedy output has
/// strictly larger total variation than a feasible competitor.
inline Counterexample2D counterexample_2d() {
    Counterexample2D out;
    out.input = {{2, 0}, {0, 0}, {0, 0}, {0, 2}, {0, 2}};

    // greedy: keep xi when |xi - u| <= 1, otherwise project onto the unit
    // sphere around u
    out.greedy.push_back({2, 0});
    for (std::size_t i = 1; i < out.input.size(); ++i) {
        const Vec2 u = out.input[i];
        const Vec2 prev = out.greedy.back();
        const Vec2 d{prev.x - u.x, prev.y - u.y};
        const double norm = std::sqrt(d.x * d.x + d.y * d.y);
        if (norm <= 1.0)
            out.greedy.push_back(prev);
        else
            out.greedy.push_back({u.x + d.x / norm, u.y + d.y / norm});
    }

    const double s5 = std::sqrt(5.0);
    const Vec2 endpoint{1.0 / s5, 2.0 - 2.0 / s5};
    out.better = {{2, 0}, {3.0 / 5, 4.0 / 5}, {3.0 / 5, 4.0 / 5}, endpoint, endpoint};

    auto tv = [](const std::vector<Vec2>& pts) {
        double s = 0.0;
        for (std::size_t i = 1; i < pts.size(); ++i) s += dist2(pts[i], pts[i - 1]);
        return s;
    };
    out.tv_greedy = tv(out.greedy);
    out.tv_better = tv(out.better);
    return out;
}

} // namespace truncvar
