#pragma once

// Test-only oracles and generators, kept independent of the library's solver
// paths: closed forms and 1-D bisection only.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "streamx/channel.hpp"
#include "streamx/rng.hpp"

namespace testsupport {

inline double h2(double p) {
    double h = 0.0;
    if (p > 0.0) h -= p * std::log2(p);
    if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
    return h;
}

// Binary divergence d(q||p) in bits.
inline double d2(double q, double p) {
    double total = 0.0;
    if (q > 0.0) total += q * std::log2(q / p);
    if (q < 1.0) total += (1.0 - q) * std::log2((1.0 - q) / (1.0 - p));
    return total;
}

// Crossover probability q in [p, 1/2] with h2(q) = 1 - R, by bisection.
inline double bsc_backoff_crossover(double p, double rate_bits) {
    if (p > 0.5) p = 1.0 - p;
    const double target = 1.0 - rate_bits;
    if (target < h2(p) || target > 1.0)
        throw std::invalid_argument("bsc_backoff_crossover: rate outside (0, C)");
    double lo = p, hi = 0.5;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (h2(mid) < target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

// Sphere-packing exponent of BSC(p) at rate R, via the 1-D reduction:
// E_sp(R) = d(q||p) with h2(q) = 1 - R.
inline double bsc_sphere_packing(double p, double rate_bits) {
    return d2(bsc_backoff_crossover(p, rate_bits), p);
}

inline double bsc_capacity(double p) { return 1.0 - h2(p); }

// nu of BSC(p): p(1-p) log2^2((1-p)/p).
inline double bsc_dispersion(double p) {
    const double l = std::log2((1.0 - p) / p);
    return p * (1.0 - p) * l * l;
}

// nu of BEC(p): p(1-p) in bits^2.
inline double bec_dispersion(double p) { return p * (1.0 - p); }

// Random strictly-positive row-stochastic matrix; entries floored away from
// zero so divergence curvatures stay moderate.
inline streamx::Dmc random_channel(std::uint64_t seed, std::size_t nx, std::size_t ny,
                                   double floor = 0.05) {
    streamx::rng::Stream s(streamx::rng::chain(streamx::rng::kSampleTag, seed));
    std::vector<double> m(nx * ny);
    for (std::size_t x = 0; x < nx; ++x) {
        double sum = 0.0;
        for (std::size_t y = 0; y < ny; ++y) {
            const double e = -std::log(1.0 - s.next_unit());
            m[x * ny + y] = e;
            sum += e;
        }
        for (std::size_t y = 0; y < ny; ++y) {
            double v = m[x * ny + y] / sum;
            v = floor + (1.0 - floor * static_cast<double>(ny)) * v;
            m[x * ny + y] = v;
        }
        double rs = 0.0;
        for (std::size_t y = 0; y < ny; ++y) rs += m[x * ny + y];
        for (std::size_t y = 0; y < ny; ++y) m[x * ny + y] /= rs;
        // exact renormalization of the largest entry
        double resid = 1.0;
        for (std::size_t y = 0; y + 1 < ny; ++y) resid -= m[x * ny + y];
        m[x * ny + ny - 1] = resid;
    }
    return {nx, ny, std::move(m)};
}

inline streamx::InputDistribution random_input(std::uint64_t seed, std::size_t nx) {
    streamx::rng::Stream s(streamx::rng::chain(streamx::rng::kSampleTag, seed ^ 0xABCDEFULL));
    std::vector<double> p(nx);
    double sum = 0.0;
    for (auto& v : p) {
        v = -std::log(1.0 - s.next_unit());
        sum += v;
    }
    for (auto& v : p) v /= sum;
    double resid = 1.0;
    for (std::size_t x = 0; x + 1 < nx; ++x) resid -= p[x];
    p[nx - 1] = resid;
    return streamx::InputDistribution(p);
}

}  // namespace testsupport
