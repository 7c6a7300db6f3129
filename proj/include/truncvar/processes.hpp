#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "truncvar/errors.hpp"
#include "truncvar/rng.hpp"
#include "truncvar/step_function.hpp"

namespace truncvar {

enum class ProcessKind { Brownian, FractionalBrownian, StableLevy };

/// Description of a sampled stochastic path. generate() is a pure function
/// of this struct: same spec, same bits.
struct PathSpec {
    ProcessKind kind = ProcessKind::Brownian;
    double hurst = 0.5;        // FractionalBrownian only, H in (0; 1)
    double stable_alpha = 2.0; // StableLevy only, a in (0; 2]
    double horizon_T = 1.0;
    std::size_t n_steps = 2;
    std::uint64_t seed = 0;

    void validate() const {
        if (!(horizon_T > 0) || !std::isfinite(horizon_T))
            throw InvalidSpec("horizon_T must be positive and finite");
        if (n_steps < 2) throw InvalidSpec("n_steps must be at least 2");
        if (kind == ProcessKind::FractionalBrownian && !(hurst > 0 && hurst < 1))
            throw InvalidSpec("Hurst parameter must lie in (0; 1), got " + std::to_string(hurst));
        if (kind == ProcessKind::StableLevy && !(stable_alpha > 0 && stable_alpha <= 2))
            throw InvalidSpec("stable index must lie in (0; 2], got " +
                              std::to_string(stable_alpha));
    }
};

namespace detail {

inline std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// In-place radix-2 Cooley-Tukey, size must be a power of two. Forward
// transform with kernel e^{-2 pi i jk / n}.
inline void fft_pow2(std::vector<std::complex<double>>& a) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    constexpr double two_pi = 6.283185307179586476925286766559;
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = -two_pi / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                const std::complex<double> u = a[i + j];
                const std::complex<double> v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

// Autocovariance of fractional Gaussian noise at integer lag, unit spacing,
// unit variance.
inline double fgn_autocov(double hurst, std::size_t lag) {
    if (lag == 0) return 1.0;
    const double k = static_cast<double>(lag);
    const double h2 = 2.0 * hurst;
    return 0.5 * (std::pow(k + 1.0, h2) - 2.0 * std::pow(k, h2) + std::pow(k - 1.0, h2));
}

// Circulant-embedding sample of n fGn increments. Returns nothing when the
// embedding eigenvalues go genuinely negative (then the caller falls back).
inline std::optional<std::vector<double>> fgn_circulant(double hurst, std::size_t n,
                                                        RandomStream& stream) {
    const std::size_t g = next_pow2(n);
    const std::size_t m = 2 * g;

    std::vector<std::complex<double>> c(m);
    for (std::size_t j = 0; j <= g; ++j) c[j] = fgn_autocov(hurst, j);
    for (std::size_t j = g + 1; j < m; ++j) c[j] = c[m - j];
    fft_pow2(c);

    std::vector<double> lambda(m);
    double max_l = 0.0, min_l = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        lambda[j] = c[j].real();
        if (lambda[j] > max_l) max_l = lambda[j];
        if (lambda[j] < min_l) min_l = lambda[j];
    }
    if (min_l < -1e-8 * max_l) return std::nullopt;
    for (double& l : lambda)
        if (l < 0) l = 0.0;

    // spectral coefficients; consumption order: w[0], w[g], then the
    // (re, im) pairs for j = 1 .. g-1
    std::vector<std::complex<double>> w(m);
    const double dm = static_cast<double>(m);
    w[0] = std::sqrt(lambda[0] / dm) * stream.next_normal();
    w[g] = std::sqrt(lambda[g] / dm) * stream.next_normal();
    for (std::size_t j = 1; j < g; ++j) {
        const double re = stream.next_normal();
        const double im = stream.next_normal();
        const double scale = std::sqrt(lambda[j] / (2.0 * dm));
        w[j] = std::complex<double>(scale * re, scale * im);
        w[m - j] = std::conj(w[j]);
    }
    fft_pow2(w);

    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = w[k].real();
    return out;
}

constexpr std::size_t kDenseFallbackCap = std::size_t{1} << 11;

// Durbin-Levinson recursion: sequential exact-covariance fGn sampling.
// O(n^2), used only when the circulant embedding does not apply.
inline std::vector<double> fgn_durbin_levinson(double hurst, std::size_t n,
                                               RandomStream& stream) {
    if (n > kDenseFallbackCap)
        throw InvalidSpec("dense fGn fallback capped at " + std::to_string(kDenseFallbackCap) +
                          " steps, got " + std::to_string(n));
    std::vector<double> x(n);
    x[0] = stream.next_normal();
    std::vector<double> phi, phi_next;
    double v = 1.0;
    for (std::size_t k = 1; k < n; ++k) {
        double num = fgn_autocov(hurst, k);
        for (std::size_t j = 1; j < k; ++j) num -= phi[j - 1] * fgn_autocov(hurst, k - j);
        const double pk = num / v;

        phi_next.assign(k, 0.0);
        for (std::size_t j = 1; j < k; ++j) phi_next[j - 1] = phi[j - 1] - pk * phi[k - j - 1];
        phi_next[k - 1] = pk;
        phi.swap(phi_next);

        v *= (1.0 - pk * pk);
        double mean = 0.0;
        for (std::size_t j = 1; j <= k; ++j) mean += phi[j - 1] * x[k - j];
        x[k] = mean + std::sqrt(v) * stream.next_normal();
    }
    return x;
}

} // namespace detail

/// Samples the requested path on the uniform grid t_k = k T / n and returns
/// it as a right-continuous step function through the samples.
inline StepFunction generate(const PathSpec& spec) {
    spec.validate();
    const std::size_t n = spec.n_steps;
    const double dt = spec.horizon_T / static_cast<double>(n);

    std::vector<double> times(n + 1);
    for (std::size_t k = 0; k <= n; ++k)
        times[k] = spec.horizon_T * static_cast<double>(k) / static_cast<double>(n);

    std::vector<double> values(n + 1, 0.0);
    RandomStream stream(spec.seed);

    switch (spec.kind) {
        case ProcessKind::Brownian: {
            const double s = std::sqrt(dt);
            for (std::size_t k = 1; k <= n; ++k)
                values[k] = values[k - 1] + s * stream.next_normal();
            break;
        }
        case ProcessKind::FractionalBrownian: {
            std::vector<double> fgn;
            if (auto emb = detail::fgn_circulant(spec.hurst, n, stream))
                fgn = std::move(*emb);
            else
                fgn = detail::fgn_durbin_levinson(spec.hurst, n, stream);
            const double s = std::pow(dt, spec.hurst);
            for (std::size_t k = 1; k <= n; ++k) values[k] = values[k - 1] + s * fgn[k - 1];
            break;
        }
        case ProcessKind::StableLevy: {
            // unit-scale symmetric increments; dt^{1/a} scaling. At a = 2 the
            // increments are Gaussian with variance 2 dt under the CMS unit-scale
            // convention.
            const double s = std::pow(dt, 1.0 / spec.stable_alpha);
            for (std::size_t k = 1; k <= n; ++k)
                values[k] = values[k - 1] + s * stream.next_stable(spec.stable_alpha);
            break;
        }
    }
    return from_samples(times, values);
}

inline const char* to_string(ProcessKind k) {
    switch (k) {
        case ProcessKind::Brownian: return "bm";
        case ProcessKind::FractionalBrownian: return "fbm";
        case ProcessKind::StableLevy: return "stable";
    }
    return "?";
}

} // namespace truncvar
