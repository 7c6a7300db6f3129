#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "truncvar/errors.hpp"
#include "truncvar/step_function.hpp"

namespace truncvar {

enum class VarMode { TV, UTV, DTV };

inline const char* to_string(VarMode m) {
    switch (m) {
        case VarMode::TV: return "tv";
        case VarMode::UTV: return "utv";
        case VarMode::DTV: return "dtv";
    }
    return "?";
}

/// Running total/upward/downward variation along the interleaved index set.
/// tv = utv + dtv holds bit-exactly by construction and all three columns
/// are nondecreasing with tv[0] = 0.
struct VariationProfile {
    std::vector<TimeLabel> times;
    std::vector<double> tv;
    std::vector<double> utv;
    std::vector<double> dtv;

    double final_tv() const { return tv.back(); }
    double final_utv() const { return utv.back(); }
    double final_dtv() const { return dtv.back(); }
};

namespace detail {

inline VariationProfile profile_from_values(const std::vector<double>& knots,
                                            const std::vector<double>& seq) {
    VariationProfile p;
    p.times = interleaved_labels(knots);
    const std::size_t n = seq.size();
    p.tv.assign(n, 0.0);
    p.utv.assign(n, 0.0);
    p.dtv.assign(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
        const double d = seq[i] - seq[i - 1];
        p.utv[i] = p.utv[i - 1] + (d > 0 ? d : 0.0);
        p.dtv[i] = p.dtv[i - 1] + (d < 0 ? -d : 0.0);
        p.tv[i] = p.utv[i] + p.dtv[i];
    }
    return p;
}

} // namespace detail

/// Exact running variation profile of f over iv.
inline VariationProfile total_variation(const StepFunction& f, const TimeInterval& iv) {
    StepFunction g = restrict_to(f, iv);
    return detail::profile_from_values(g.knots(), g.interleaved());
}

/// Whole-horizon overload; a single-knot function has zero variation.
inline VariationProfile total_variation(const StepFunction& f) {
    if (f.single_point()) {
        VariationProfile p;
        p.times = {{true, f.start_time(), f.start_time()}};
        p.tv = {0.0};
        p.utv = {0.0};
        p.dtv = {0.0};
        return p;
    }
    return detail::profile_from_values(f.knots(), f.interleaved());
}

namespace detail {

// sup over index subsequences of sum |x_{m_j} - x_{m_{j-1}}|^p, by DP with
// state "last chosen index". Exact for step functions because values are
// constant between interleaved representatives.
inline double p_variation_values(const std::vector<double>& x, double p) {
    const std::size_t n = x.size();
    if (n < 2) return 0.0;
    std::vector<double> best(n, 0.0); // best sum of a chain ending at i
    double result = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            const double term = std::pow(std::abs(x[i] - x[j]), p);
            const double cand = best[j] + term;
            if (cand > best[i]) best[i] = cand;
        }
        if (best[i] > result) result = best[i];
    }
    return result;
}

} // namespace detail

/// p-variation of f over iv, p >= 1.
inline double p_variation(const StepFunction& f, double p, const TimeInterval& iv) {
    if (!(p >= 1.0)) throw InvalidExponent("p-variation requires p >= 1, got " + std::to_string(p));
    StepFunction g = restrict_to(f, iv);
    return detail::p_variation_values(g.interleaved(), p);
}

inline double p_variation(const StepFunction& f, double p) {
    if (!(p >= 1.0)) throw InvalidExponent("p-variation requires p >= 1, got " + std::to_string(p));
    if (f.single_point()) return 0.0;
    return detail::p_variation_values(f.interleaved(), p);
}

namespace detail {

constexpr std::size_t kOracleDpCap = 2000;
constexpr std::size_t kOracleExhaustiveCap = 14;

// Truncated-variation summand over a chosen pair (earlier index s, later t).
// mode TV:  (|psi_t - psi_s| - c)_+            (constant band)
// mode UTV: (psi_t - psi_s - c)_+
// mode DTV: (psi_s - psi_t - c)_+
inline double trunc_term(double prev, double cur, double c, VarMode mode) {
    switch (mode) {
        case VarMode::TV: {
            const double d = std::abs(cur - prev) - c;
            return d > 0 ? d : 0.0;
        }
        case VarMode::UTV: {
            const double d = cur - prev - c;
            return d > 0 ? d : 0.0;
        }
        case VarMode::DTV: {
            const double d = prev - cur - c;
            return d > 0 ? d : 0.0;
        }
    }
    return 0.0;
}

// Band-dependent summand written through the two tracks
// upper = psi - alpha and lower = psi - beta:
//   UTV: (lower_t - upper_s)_+   DTV: (lower_s - upper_t)_+   TV: max of both.
inline double ab_term(double upper_s, double lower_s, double upper_t, double lower_t,
                      VarMode mode) {
    switch (mode) {
        case VarMode::TV: {
            const double up = lower_t - upper_s;
            const double dn = lower_s - upper_t;
            const double d = up > dn ? up : dn;
            return d > 0 ? d : 0.0;
        }
        case VarMode::UTV: {
            const double d = lower_t - upper_s;
            return d > 0 ? d : 0.0;
        }
        case VarMode::DTV: {
            const double d = lower_s - upper_t;
            return d > 0 ? d : 0.0;
        }
    }
    return 0.0;
}

// Generic chain DP: running prefix maxima of the best chain ending at each
// index. Ties on value prefer the shorter chain (deterministic, no effect on
// the returned value). Returns the sup for every prefix [0; i].
template <typename Term>
std::vector<double> chain_dp_prefixes(std::size_t n, Term term) {
    std::vector<double> best(n, 0.0);
    std::vector<std::size_t> len(n, 1);
    std::vector<double> prefix(n, 0.0);
    double run = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            const double cand = best[j] + term(j, i);
            if (cand > best[i] || (cand == best[i] && len[j] + 1 < len[i])) {
                best[i] = cand;
                len[i] = len[j] + 1;
            }
        }
        if (best[i] > run) run = best[i];
        prefix[i] = run;
    }
    return prefix;
}

// Exhaustive sup over all 2^n index subsets; validates the DP itself.
template <typename Term>
double chain_exhaustive(std::size_t n, Term term) {
    if (n > kOracleExhaustiveCap)
        throw OracleTooLarge("exhaustive enumeration capped at " +
                             std::to_string(kOracleExhaustiveCap) + " indices, got " +
                             std::to_string(n));
    double result = 0.0;
    const std::uint64_t lim = std::uint64_t{1} << n;
    for (std::uint64_t mask = 0; mask < lim; ++mask) {
        double sum = 0.0;
        bool have_prev = false;
        std::size_t prev = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!(mask & (std::uint64_t{1} << i))) continue;
            if (have_prev) sum += term(prev, i);
            prev = i;
            have_prev = true;
        }
        if (sum > result) result = sum;
    }
    return result;
}

} // namespace detail

/// Literal truncated variation TV^c / UTV^c / DTV^c of f over iv, evaluated
/// as a sup over index subsequences by O(n^2) DP. Reference implementation
/// for validating the fast envelope route.
inline double tv_trunc_oracle(const StepFunction& f, double c, const TimeInterval& iv,
                              VarMode mode, std::size_t cap = detail::kOracleDpCap) {
    if (!(c >= 0)) throw InvalidSpec("truncation level c must be >= 0");
    StepFunction g = restrict_to(f, iv);
    const std::vector<double> x = g.interleaved();
    if (x.size() > cap)
        throw OracleTooLarge("oracle DP capped at " + std::to_string(cap) +
                             " indices, got " + std::to_string(x.size()));
    auto term = [&](std::size_t s, std::size_t t) { return detail::trunc_term(x[s], x[t], c, mode); };
    return detail::chain_dp_prefixes(x.size(), term).back();
}

/// Exhaustive O(2^n) variant of tv_trunc_oracle, n <= 14.
inline double tv_trunc_exhaustive(const StepFunction& f, double c, const TimeInterval& iv,
                                  VarMode mode) {
    if (!(c >= 0)) throw InvalidSpec("truncation level c must be >= 0");
    StepFunction g = restrict_to(f, iv);
    const std::vector<double> x = g.interleaved();
    auto term = [&](std::size_t s, std::size_t t) { return detail::trunc_term(x[s], x[t], c, mode); };
    return detail::chain_exhaustive(x.size(), term);
}

/// Band-dependent truncated variation of a triple over the index range
/// [lo; hi], evaluated by the same chain DP.
inline double ab_trunc_oracle(const DiscreteTriple& tri, std::size_t lo, std::size_t hi,
                              VarMode mode, std::size_t cap = detail::kOracleDpCap) {
    if (hi >= tri.size() || lo > hi) throw OutOfDomain("oracle index range out of bounds");
    const std::size_t n = hi - lo + 1;
    if (n > cap)
        throw OracleTooLarge("oracle DP capped at " + std::to_string(cap) +
                             " indices, got " + std::to_string(n));
    const auto& psi = tri.psi();
    const auto& a = tri.alpha();
    const auto& b = tri.beta();
    auto term = [&](std::size_t s, std::size_t t) {
        const std::size_t i = lo + s, j = lo + t;
        return detail::ab_term(psi[i] - a[i], psi[i] - b[i], psi[j] - a[j], psi[j] - b[j], mode);
    };
    return detail::chain_dp_prefixes(n, term).back();
}

/// Per-prefix oracle values: entry i is the sup over [lo; lo+i].
inline std::vector<double> ab_trunc_oracle_prefixes(const DiscreteTriple& tri, std::size_t lo,
                                                    std::size_t hi, VarMode mode,
                                                    std::size_t cap = detail::kOracleDpCap) {
    if (hi >= tri.size() || lo > hi) throw OutOfDomain("oracle index range out of bounds");
    const std::size_t n = hi - lo + 1;
    if (n > cap)
        throw OracleTooLarge("oracle DP capped at " + std::to_string(cap) +
                             " indices, got " + std::to_string(n));
    const auto& psi = tri.psi();
    const auto& a = tri.alpha();
    const auto& b = tri.beta();
    auto term = [&](std::size_t s, std::size_t t) {
        const std::size_t i = lo + s, j = lo + t;
        return detail::ab_term(psi[i] - a[i], psi[i] - b[i], psi[j] - a[j], psi[j] - b[j], mode);
    };
    return detail::chain_dp_prefixes(n, term);
}

/// Exhaustive O(2^n) variant of ab_trunc_oracle, n <= 14.
inline double ab_trunc_exhaustive(const DiscreteTriple& tri, std::size_t lo, std::size_t hi,
                                  VarMode mode) {
    if (hi >= tri.size() || lo > hi) throw OutOfDomain("oracle index range out of bounds");
    const std::size_t n = hi - lo + 1;
    const auto& psi = tri.psi();
    const auto& a = tri.alpha();
    const auto& b = tri.beta();
    auto term = [&](std::size_t s, std::size_t t) {
        const std::size_t i = lo + s, j = lo + t;
        return detail::ab_term(psi[i] - a[i], psi[i] - b[i], psi[j] - a[j], psi[j] - b[j], mode);
    };
    return detail::chain_exhaustive(n, term);
}

} // namespace truncvar
