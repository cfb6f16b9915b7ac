#pragma once

#include <cstdint>
#include <vector>

namespace streamx::stats {

// Compensated accumulation in extended precision, for sums that feed
// 1e-12-level equality checks.
struct KahanLd {
    long double sum{0.0L};
    long double carry{0.0L};

    void add(long double v) noexcept {
        const long double y = v - carry;
        const long double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    [[nodiscard]] long double value() const noexcept { return sum; }
};

double binary_entropy_bits(double p);

// Regularized incomplete beta function I_x(a, b).
double betainc(double a, double b, double x);

// Inverse of I_x(a, b) in x for fixed (a, b).
double betainc_inv(double a, double b, double p);

struct Interval {
    double lo;
    double hi;
};

// Clopper-Pearson two-sided interval for a binomial proportion.
Interval clopper_pearson(std::uint64_t errors, std::uint64_t trials, double confidence = 0.95);

// Pearson chi-square statistic of observed counts against expected probabilities.
double chi_square_stat(const std::vector<std::uint64_t>& counts, const std::vector<double>& probs);

}  // namespace streamx::stats
