#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <string>
#include <thread>
#include <vector>

#include "truncvar/envelope.hpp"
#include "truncvar/errors.hpp"
#include "truncvar/processes.hpp"
#include "truncvar/rng.hpp"

namespace truncvar {

/// Per-c Monte Carlo summary of TV^c for a path family, plus the fitted
/// log-log slope. The grid is stored strictly increasing and the mean column
/// is nonincreasing in c.
struct RateReport {
    std::vector<double> c_grid;
    std::vector<double> tv_mean;
    std::vector<double> tv_stderr;
    std::vector<double> tv_median;
    std::vector<double> c_times_tv; // c * mean TV^c
    double slope = 0.0;
    double slope_ci = 0.0; // 95% half-width
    double slope_median = 0.0;
    std::vector<std::string> warnings;
};

struct LoglogFit {
    double slope;
    double intercept;
    double ci95; // half-width of the 95% confidence interval on the slope
};

namespace detail {

// two-sided 97.5% Student-t quantiles for df = 1..30; 1.96 beyond
inline double t_quantile_975(std::size_t df) {
    static const double table[] = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306,
                                   2.262,  2.228, 2.201, 2.179, 2.160, 2.145, 2.131, 2.120,
                                   2.110,  2.101, 2.093, 2.086, 2.080, 2.074, 2.069, 2.064,
                                   2.060,  2.056, 2.052, 2.048, 2.045, 2.042};
    if (df == 0) return 12.706;
    if (df <= 30) return table[df - 1];
    return 1.96;
}

inline double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n % 2 == 1) return v[n / 2];
    return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace detail

/// Ordinary least squares on (log x, log y).
inline LoglogFit fit_loglog(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size()) throw LengthMismatch("fit_loglog needs equal-length inputs");
    const std::size_t n = xs.size();
    if (n < 2) throw InsufficientData("fit_loglog needs at least two points");
    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(xs[i] > 0) || !(ys[i] > 0))
            throw InsufficientData("fit_loglog needs strictly positive data");
        lx[i] = std::log(xs[i]);
        ly[i] = std::log(ys[i]);
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (sxx == 0) throw InsufficientData("fit_loglog needs at least two distinct x values");
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;
    double ss_res = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = ly[i] - (intercept + slope * lx[i]);
        ss_res += r * r;
    }
    double ci = 0.0;
    if (n > 2) {
        const double se = std::sqrt(ss_res / static_cast<double>(n - 2) / sxx);
        ci = detail::t_quantile_975(n - 2) * se;
    }
    return {slope, intercept, ci};
}

/// Log-spaced grid of n_points values from c_min to c_max, increasing.
inline std::vector<double> log_spaced_grid(double c_min, double c_max, std::size_t n_points) {
    if (!(c_min > 0) || !(c_min < c_max))
        throw InvalidGrid("need 0 < c_min < c_max, got [" + std::to_string(c_min) + "; " +
                          std::to_string(c_max) + "]");
    if (n_points < 4) throw InvalidGrid("need at least 4 grid points");
    std::vector<double> grid(n_points);
    const double l0 = std::log(c_min);
    const double l1 = std::log(c_max);
    for (std::size_t i = 0; i < n_points; ++i) {
        const double f = static_cast<double>(i) / static_cast<double>(n_points - 1);
        grid[i] = std::exp(l0 + f * (l1 - l0));
    }
    grid.front() = c_min;
    grid.back() = c_max;
    return grid;
}

/// Monte Carlo estimate of the growth of TV^c as c decreases. Replicate r
/// uses the derived stream rng::derive(spec.seed, r). Replicates run as
/// independent work items on a small pool writing into preassigned slots;
/// the reduction order is fixed, so the report does not depend on worker
/// scheduling.
inline RateReport estimate_rate(const PathSpec& spec, double c_min, double c_max,
                                std::size_t n_points, std::size_t replicates) {
    spec.validate();
    if (replicates < 1) throw InsufficientData("need at least one replicate");
    RateReport rep;
    rep.c_grid = log_spaced_grid(c_min, c_max, n_points);

    std::vector<std::vector<double>> tv(n_points, std::vector<double>(replicates, 0.0));
    double first_median_inc = 0.0;

    auto run_replicate = [&](std::size_t r) {
        PathSpec ps = spec;
        ps.seed = rng::derive(spec.seed, r);
        StepFunction path = generate(ps);
        if (r == 0) {
            const auto& v = path.point_values();
            std::vector<double> inc(v.size() - 1);
            for (std::size_t k = 0; k + 1 < v.size(); ++k) inc[k] = std::abs(v[k + 1] - v[k]);
            first_median_inc = detail::median_of(inc);
        }
        for (std::size_t i = 0; i < n_points; ++i)
            tv[i][r] = tv_truncated(path, rep.c_grid[i]).final_tv();
    };

    const std::size_t workers =
        std::min<std::size_t>(replicates,
                              std::max(1u, std::thread::hardware_concurrency()));
    if (workers <= 1) {
        for (std::size_t r = 0; r < replicates; ++r) run_replicate(r);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t r = next.fetch_add(1); r < replicates; r = next.fetch_add(1))
                    run_replicate(r);
            });
        for (auto& t : pool) t.join();
    }

    // discretisation floor: TV^c saturates once c falls below the increment
    // scale of the sampled path
    if (c_min < 3.0 * first_median_inc)
        rep.warnings.push_back("c_min = " + std::to_string(c_min) +
                               " is below 3x the median increment " +
                               std::to_string(first_median_inc) +
                               "; TV^c is dominated by sampling resolution there");

    const double dr = static_cast<double>(replicates);
    for (std::size_t i = 0; i < n_points; ++i) {
        double mean = 0;
        for (double x : tv[i]) mean += x;
        mean /= dr;
        double var = 0;
        for (double x : tv[i]) var += (x - mean) * (x - mean);
        const double stderr_ = replicates > 1 ? std::sqrt(var / (dr - 1.0) / dr) : 0.0;
        rep.tv_mean.push_back(mean);
        rep.tv_stderr.push_back(stderr_);
        rep.tv_median.push_back(detail::median_of(tv[i]));
        rep.c_times_tv.push_back(rep.c_grid[i] * mean);
    }

    for (std::size_t i = 0; i < n_points; ++i)
        if (!(rep.tv_mean[i] > 0))
            throw InsufficientData("mean TV^c vanished at c = " + std::to_string(rep.c_grid[i]) +
                                   "; the grid is too coarse for this path family");

    const LoglogFit fm = fit_loglog(rep.c_grid, rep.tv_mean);
    rep.slope = fm.slope;
    rep.slope_ci = fm.ci95;
    bool median_positive = true;
    for (double m : rep.tv_median)
        if (!(m > 0)) median_positive = false;
    rep.slope_median = median_positive ? fit_loglog(rep.c_grid, rep.tv_median).slope : 0.0;
    return rep;
}

struct Lemma1Row {
    double c;
    double c_tv_base; // c * TV^c(psi1)
    double c_tv_sum;  // c * TV^c(psi1 + psi2)
    double ratio;     // c_tv_sum / c_tv_base
    bool est1_ok;     // TV^c(sum)      <= TV^{dc}(psi1) + TV^{(1-d)c}(psi2)
    bool est2_ok;     // TV^{dc}(sum)   >= TV^c(psi1)    - TV^{(1-d)c}(psi2)
};

struct Lemma1Result {
    std::vector<Lemma1Row> rows;
    std::size_t sandwich_violations = 0;
};

/// Adds a smooth finite-variation perturbation (a sinusoid) to a generated
/// path and tabulates c * TV^c for both, with the deterministic sandwich
/// bounds checked at delta = 0.9.
inline Lemma1Result lemma1_experiment(const PathSpec& spec, double smooth_amp,
                                      const std::vector<double>& c_grid) {
    spec.validate();
    if (c_grid.empty()) throw InvalidGrid("lemma1_experiment needs a nonempty c grid");
    for (double c : c_grid)
        if (!(c > 0)) throw InvalidGrid("lemma1_experiment needs c > 0");

    StepFunction psi1 = generate(spec);
    const auto& times = psi1.knots();
    const auto& v1 = psi1.point_values();
    constexpr double two_pi = 6.283185307179586476925286766559;
    std::vector<double> v2(times.size()), vs(times.size());
    for (std::size_t k = 0; k < times.size(); ++k) {
        v2[k] = smooth_amp * std::sin(two_pi * times[k] / spec.horizon_T);
        vs[k] = v1[k] + v2[k];
    }
    StepFunction psi2 = from_samples(times, v2);
    StepFunction sum = from_samples(times, vs);

    constexpr double delta = 0.9;
    constexpr double slack = 1e-9;
    Lemma1Result out;
    for (double c : c_grid) {
        Lemma1Row row{};
        row.c = c;
        const double tv1 = tv_truncated(psi1, c).final_tv();
        const double tvs = tv_truncated(sum, c).final_tv();
        const double tv2_part = tv_truncated(psi2, (1.0 - delta) * c).final_tv();
        row.c_tv_base = c * tv1;
        row.c_tv_sum = c * tvs;
        row.ratio = row.c_tv_base != 0 ? row.c_tv_sum / row.c_tv_base
                                       : (row.c_tv_sum == 0 ? 1.0 : 0.0);
        row.est1_ok = tvs <= tv_truncated(psi1, delta * c).final_tv() + tv2_part + slack;
        row.est2_ok = tv_truncated(sum, delta * c).final_tv() >= tv1 - tv2_part - slack;
        if (!row.est1_ok || !row.est2_ok) ++out.sandwich_violations;
        out.rows.push_back(row);
    }
    return out;
}

} // namespace truncvar
