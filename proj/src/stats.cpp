#include "streamx/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace streamx::stats {

double binary_entropy_bits(double p) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("binary_entropy_bits: p outside [0,1]");
    double h = 0.0;
    if (p > 0.0) h -= p * std::log2(p);
    if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
    return h;
}

namespace {

// Continued fraction for the incomplete beta function (modified Lentz).
double betacf(double a, double b, double x) {
    constexpr int max_it = 300;
    constexpr double eps = 3e-16;
    constexpr double fpmin = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_it; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) break;
    }
    return h;
}

}  // namespace

double betainc(double a, double b, double x) {
    if (a <= 0.0 || b <= 0.0) throw std::invalid_argument("betainc: a, b must be positive");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                         a * std::log(x) + b * std::log1p(-x);
    const double bt = std::exp(ln_bt);
    if (x < (a + 1.0) / (a + b + 2.0)) return bt * betacf(a, b, x) / a;
    return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

double betainc_inv(double a, double b, double p) {
    if (p <= 0.0) return 0.0;
    if (p >= 1.0) return 1.0;
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (betainc(a, b, mid) < p)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

Interval clopper_pearson(std::uint64_t errors, std::uint64_t trials, double confidence) {
    if (trials == 0) throw std::invalid_argument("clopper_pearson: trials must be positive");
    if (errors > trials) throw std::invalid_argument("clopper_pearson: errors exceed trials");
    const double alpha = 1.0 - confidence;
    const auto x = static_cast<double>(errors);
    const auto n = static_cast<double>(trials);
    Interval ci{0.0, 1.0};
    if (errors > 0) ci.lo = betainc_inv(x, n - x + 1.0, alpha / 2.0);
    if (errors < trials) ci.hi = betainc_inv(x + 1.0, n - x, 1.0 - alpha / 2.0);
    return ci;
}

double chi_square_stat(const std::vector<std::uint64_t>& counts, const std::vector<double>& probs) {
    if (counts.size() != probs.size())
        throw std::invalid_argument("chi_square_stat: size mismatch");
    std::uint64_t total = 0;
    for (auto c : counts) total += c;
    double stat = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const double expected = probs[i] * static_cast<double>(total);
        if (expected <= 0.0) {
            if (counts[i] != 0)
                throw std::invalid_argument("chi_square_stat: observed count in zero-probability cell");
            continue;
        }
        const double diff = static_cast<double>(counts[i]) - expected;
        stat += diff * diff / expected;
    }
    return stat;
}

}  // namespace streamx::stats
