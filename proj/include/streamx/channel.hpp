#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

// Discrete memoryless channels and the per-letter information quantities
// everything else is built on. Conventions, fixed globally:
//   - all logarithms base 2 (rates in bits, variances in bits^2),
//   - 0 * log(0/q) = 0,
//   - q * log(q/0) = +inf  (returned as the infinity sentinel).
// All types here are immutable after construction and safe to share across
// threads.

namespace streamx {

inline constexpr double kProbTol = 1e-12;      // simplex / row-sum validation tolerance
inline constexpr double kSymmetryTol = 1e-12;  // float equality in symmetry detection

inline constexpr double infinity() { return std::numeric_limits<double>::infinity(); }

class solver_error : public std::runtime_error {
  public:
    solver_error(const std::string& what, double gap_achieved)
        : std::runtime_error(what), gap_(gap_achieved) {}
    [[nodiscard]] double gap() const noexcept { return gap_; }

  private:
    double gap_;
};

// Row-stochastic transition matrix W(y|x) on finite alphabets.
class Dmc {
  public:
    Dmc(std::size_t input_size, std::size_t output_size, std::vector<double> row_major);

    [[nodiscard]] std::size_t input_size() const noexcept { return nx_; }
    [[nodiscard]] std::size_t output_size() const noexcept { return ny_; }
    [[nodiscard]] double operator()(std::size_t x, std::size_t y) const noexcept {
        return w_[x * ny_ + y];
    }
    [[nodiscard]] std::span<const double> row(std::size_t x) const noexcept {
        return {w_.data() + x * ny_, ny_};
    }
    [[nodiscard]] const std::vector<double>& matrix() const noexcept { return w_; }

    static Dmc bsc(double p);
    static Dmc bec(double p);                       // outputs ordered 0, 1, erasure
    static Dmc z_channel(double q);                 // rows (1,0), (q,1-q)
    static Dmc identity(std::size_t k);

  private:
    std::size_t nx_;
    std::size_t ny_;
    std::vector<double> w_;
};

// Probability vector on the input alphabet.
class InputDistribution {
  public:
    explicit InputDistribution(std::vector<double> probs);
    static InputDistribution uniform(std::size_t k);
    static InputDistribution point_mass(std::size_t k, std::size_t at);

    [[nodiscard]] std::size_t size() const noexcept { return p_.size(); }
    [[nodiscard]] double operator()(std::size_t x) const noexcept { return p_[x]; }
    [[nodiscard]] const std::vector<double>& probs() const noexcept { return p_; }

  private:
    std::vector<double> p_;
};

double entropy_bits(const InputDistribution& p);

// Output law PW(y) = sum_x P(x) W(y|x).
std::vector<double> output_distribution(const InputDistribution& p, const Dmc& w);

// i(x^l; y^l) = sum_j log2 W(y_j|x_j) / PW(y_j).  Returns -inf when some
// W(y_j|x_j) = 0 while PW(y_j) > 0; throws when PW(y_j) = 0 for an observed
// y_j (impossible output under P, i.e. inconsistent inputs).
double information_density(const InputDistribution& p, const Dmc& w,
                           std::span<const std::size_t> x_seq,
                           std::span<const std::size_t> y_seq);

double mutual_information(const InputDistribution& p, const Dmc& w);

struct InformationVariances {
    double unconditional;  // U(P,W) = var[i(X;Y)]
    double conditional;    // V(P,W) = E[var[i(X;Y)|X]]
};
InformationVariances information_variances(const InputDistribution& p, const Dmc& w);

struct CapacityResult {
    double capacity_bits;
    InputDistribution input;
    double gap;  // certified upper-lower bound gap at exit
    std::size_t iterations;
};

// Alternating maximization with the standard upper/lower capacity gap as the
// stopping rule; throws solver_error (carrying the achieved gap) at the
// iteration cap.
CapacityResult capacity(const Dmc& w, double tol = 1e-9, std::size_t max_iter = 1'000'000);

struct DispersionResult {
    double dispersion_bits2;
    InputDistribution input;
    bool used_symmetry;
};

// min V(P,W) over the numerically identified capacity-achieving set: the
// uniform-input shortcut for output-symmetric channels, otherwise multi-start
// local search over {P : I(P,W) >= C - tol}.
DispersionResult dispersion(const Dmc& w, double tol = 1e-9);

struct SymmetryResult {
    bool symmetric;
    std::vector<std::vector<std::size_t>> partition;  // groups of output symbols
};

// Gallager output symmetry: group output columns by sorted column vector,
// then require mutually permuted rows and columns inside every group.
SymmetryResult output_symmetry(const Dmc& w, double tol = kSymmetryTol);

// D(V(.|x) || W(.|x)) in bits; +inf when V escapes W's support.
double kl_row(const Dmc& v, const Dmc& w, std::size_t x);

// D(V || W | P) = sum_x P(x) D(V(.|x) || W(.|x)).
double conditional_kl(const Dmc& v, const Dmc& w, const InputDistribution& p);

struct ChannelSummary {
    double capacity_bits;
    InputDistribution capacity_input;
    double dispersion_bits2;
    bool output_symmetric;
    double solver_tolerance;
};

ChannelSummary summarize(const Dmc& w, double tol = 1e-9);

}  // namespace streamx
