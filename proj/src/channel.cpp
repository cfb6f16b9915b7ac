#include "streamx/channel.hpp"

#include <algorithm>
#include <cmath>

#include "streamx/rng.hpp"

namespace streamx {

namespace {

void check_prob_vector(std::span<const double> v, const char* what) {
    double sum = 0.0;
    for (double p : v) {
        if (!(p >= 0.0 && p <= 1.0))
            throw std::invalid_argument(std::string(what) + ": entry outside [0,1]");
        sum += p;
    }
    if (std::fabs(sum - 1.0) > kProbTol)
        throw std::invalid_argument(std::string(what) + ": probabilities do not sum to 1");
}

}  // namespace

Dmc::Dmc(std::size_t input_size, std::size_t output_size, std::vector<double> row_major)
    : nx_(input_size), ny_(output_size), w_(std::move(row_major)) {
    if (nx_ < 1 || ny_ < 1) throw std::invalid_argument("Dmc: alphabet sizes must be >= 1");
    if (w_.size() != nx_ * ny_) throw std::invalid_argument("Dmc: matrix shape mismatch");
    for (std::size_t x = 0; x < nx_; ++x) check_prob_vector(row(x), "Dmc row");
}

Dmc Dmc::bsc(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("bsc: p outside [0,1]");
    return {2, 2, {1.0 - p, p, p, 1.0 - p}};
}

Dmc Dmc::bec(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("bec: p outside [0,1]");
    return {2, 3, {1.0 - p, 0.0, p, 0.0, 1.0 - p, p}};
}

Dmc Dmc::z_channel(double q) {
    if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("z_channel: q outside [0,1]");
    return {2, 2, {1.0, 0.0, q, 1.0 - q}};
}

Dmc Dmc::identity(std::size_t k) {
    if (k < 1) throw std::invalid_argument("identity: k must be >= 1");
    std::vector<double> m(k * k, 0.0);
    for (std::size_t i = 0; i < k; ++i) m[i * k + i] = 1.0;
    return {k, k, std::move(m)};
}

InputDistribution::InputDistribution(std::vector<double> probs) : p_(std::move(probs)) {
    if (p_.empty()) throw std::invalid_argument("InputDistribution: empty");
    check_prob_vector(p_, "InputDistribution");
}

InputDistribution InputDistribution::uniform(std::size_t k) {
    if (k < 1) throw std::invalid_argument("InputDistribution::uniform: k must be >= 1");
    return InputDistribution(std::vector<double>(k, 1.0 / static_cast<double>(k)));
}

InputDistribution InputDistribution::point_mass(std::size_t k, std::size_t at) {
    if (at >= k) throw std::invalid_argument("InputDistribution::point_mass: index out of range");
    std::vector<double> p(k, 0.0);
    p[at] = 1.0;
    return InputDistribution(std::move(p));
}

double entropy_bits(const InputDistribution& p) {
    double h = 0.0;
    for (std::size_t x = 0; x < p.size(); ++x)
        if (p(x) > 0.0) h -= p(x) * std::log2(p(x));
    return h;
}

std::vector<double> output_distribution(const InputDistribution& p, const Dmc& w) {
    if (p.size() != w.input_size())
        throw std::invalid_argument("output_distribution: alphabet mismatch");
    std::vector<double> pw(w.output_size(), 0.0);
    for (std::size_t x = 0; x < w.input_size(); ++x) {
        if (p(x) == 0.0) continue;
        for (std::size_t y = 0; y < w.output_size(); ++y) pw[y] += p(x) * w(x, y);
    }
    return pw;
}

double information_density(const InputDistribution& p, const Dmc& w,
                           std::span<const std::size_t> x_seq,
                           std::span<const std::size_t> y_seq) {
    if (p.size() != w.input_size())
        throw std::invalid_argument("information_density: alphabet mismatch");
    if (x_seq.empty() || x_seq.size() != y_seq.size())
        throw std::invalid_argument("information_density: sequences must be nonempty and equal length");
    const auto pw = output_distribution(p, w);
    double total = 0.0;
    for (std::size_t j = 0; j < x_seq.size(); ++j) {
        const std::size_t x = x_seq[j], y = y_seq[j];
        if (x >= w.input_size() || y >= w.output_size())
            throw std::invalid_argument("information_density: symbol out of range");
        if (pw[y] <= 0.0)
            throw std::invalid_argument("information_density: observed output has zero probability under P");
        if (w(x, y) == 0.0) return -infinity();
        total += std::log2(w(x, y)) - std::log2(pw[y]);
    }
    return total;
}

double mutual_information(const InputDistribution& p, const Dmc& w) {
    if (p.size() != w.input_size())
        throw std::invalid_argument("mutual_information: alphabet mismatch");
    const auto pw = output_distribution(p, w);
    double total = 0.0;
    for (std::size_t x = 0; x < w.input_size(); ++x) {
        if (p(x) == 0.0) continue;
        for (std::size_t y = 0; y < w.output_size(); ++y) {
            const double wxy = w(x, y);
            if (wxy == 0.0) continue;
            total += p(x) * wxy * (std::log2(wxy) - std::log2(pw[y]));
        }
    }
    return std::max(total, 0.0);
}

InformationVariances information_variances(const InputDistribution& p, const Dmc& w) {
    if (p.size() != w.input_size())
        throw std::invalid_argument("information_variances: alphabet mismatch");
    const auto pw = output_distribution(p, w);
    double mean = 0.0, second = 0.0, cond = 0.0;
    for (std::size_t x = 0; x < w.input_size(); ++x) {
        if (p(x) == 0.0) continue;
        double mx = 0.0, m2x = 0.0;
        for (std::size_t y = 0; y < w.output_size(); ++y) {
            const double wxy = w(x, y);
            if (wxy == 0.0) continue;
            const double d = std::log2(wxy) - std::log2(pw[y]);
            mx += wxy * d;
            m2x += wxy * d * d;
        }
        mean += p(x) * mx;
        second += p(x) * m2x;
        cond += p(x) * (m2x - mx * mx);
    }
    const double uncond = second - mean * mean;
    return {std::max(uncond, 0.0), std::max(cond, 0.0)};
}

CapacityResult capacity(const Dmc& w, double tol, std::size_t max_iter) {
    if (!(tol > 0.0)) throw std::invalid_argument("capacity: tol must be positive");
    const std::size_t nx = w.input_size(), ny = w.output_size();
    std::vector<double> p(nx, 1.0 / static_cast<double>(nx));
    std::vector<double> pw(ny), d(nx);
    double lower = 0.0, upper = infinity();
    for (std::size_t iter = 1; iter <= max_iter; ++iter) {
        std::fill(pw.begin(), pw.end(), 0.0);
        for (std::size_t x = 0; x < nx; ++x)
            for (std::size_t y = 0; y < ny; ++y) pw[y] += p[x] * w(x, y);
        lower = 0.0;
        upper = -infinity();
        for (std::size_t x = 0; x < nx; ++x) {
            double dx = 0.0;
            for (std::size_t y = 0; y < ny; ++y) {
                const double wxy = w(x, y);
                if (wxy == 0.0) continue;
                dx += wxy * (std::log2(wxy) - std::log2(pw[y]));
            }
            d[x] = dx;
            lower += p[x] * dx;
            upper = std::max(upper, dx);
        }
        if (upper - lower <= tol) {
            return {std::max(lower, 0.0), InputDistribution(p), upper - lower, iter};
        }
        double norm = 0.0;
        for (std::size_t x = 0; x < nx; ++x) {
            p[x] *= std::exp2(d[x] - upper);
            norm += p[x];
        }
        for (auto& px : p) px /= norm;
    }
    throw solver_error("capacity: no convergence within iteration cap", upper - lower);
}

namespace {

void project_to_simplex(std::vector<double>& v) {
    double sum = 0.0;
    for (auto& x : v) {
        if (x < 0.0) x = 0.0;
        sum += x;
    }
    if (sum <= 0.0) {
        std::fill(v.begin(), v.end(), 1.0 / static_cast<double>(v.size()));
        return;
    }
    for (auto& x : v) x /= sum;
}

}  // namespace

DispersionResult dispersion(const Dmc& w, double tol) {
    const auto sym = output_symmetry(w);
    if (sym.symmetric) {
        const auto u = InputDistribution::uniform(w.input_size());
        return {information_variances(u, w).conditional, u, true};
    }

    const auto cap = capacity(w, tol);
    const double feasible_floor = cap.capacity_bits - tol;
    const auto feasible = [&](const InputDistribution& p) {
        return mutual_information(p, w) >= feasible_floor;
    };

    InputDistribution best_p = cap.input;
    double best_v = information_variances(best_p, w).conditional;

    // Multi-start pattern search over the capacity slack set.  The feasible
    // set is a convex neighborhood of the capacity-achieving polytope, so
    // starts cluster around the solver's input.
    std::vector<std::vector<double>> starts;
    starts.push_back(cap.input.probs());
    const std::size_t nx = w.input_size();
    for (double blend : {0.9, 0.7}) {
        std::vector<double> s(nx);
        for (std::size_t x = 0; x < nx; ++x)
            s[x] = blend * cap.input(x) + (1.0 - blend) / static_cast<double>(nx);
        starts.push_back(std::move(s));
    }
    rng::Stream jitter(rng::chain(rng::kSearchTag, 0xD15BU));
    for (int r = 0; r < 5; ++r) {
        std::vector<double> s(nx);
        for (std::size_t x = 0; x < nx; ++x)
            s[x] = cap.input(x) * (0.5 + jitter.next_unit());
        project_to_simplex(s);
        starts.push_back(std::move(s));
    }

    for (auto& start : starts) {
        std::vector<double> p = start;
        project_to_simplex(p);
        // pull toward the capacity input until feasible
        for (int pull = 0; pull < 60; ++pull) {
            if (feasible(InputDistribution(p))) break;
            for (std::size_t x = 0; x < nx; ++x) p[x] = 0.5 * (p[x] + cap.input(x));
        }
        InputDistribution cur(p);
        if (!feasible(cur)) continue;
        double cur_v = information_variances(cur, w).conditional;
        for (double step = 0.05; step > 1e-7; step *= 0.5) {
            bool improved = true;
            while (improved) {
                improved = false;
                for (std::size_t i = 0; i < nx; ++i) {
                    for (std::size_t j = 0; j < nx; ++j) {
                        if (i == j || cur(i) < step) continue;
                        auto cand = cur.probs();
                        cand[i] -= step;
                        cand[j] += step;
                        InputDistribution q(cand);
                        if (!feasible(q)) continue;
                        const double v = information_variances(q, w).conditional;
                        if (v < cur_v - 1e-15) {
                            cur = q;
                            cur_v = v;
                            improved = true;
                        }
                    }
                }
            }
        }
        if (cur_v < best_v) {
            best_v = cur_v;
            best_p = cur;
        }
    }
    return {best_v, best_p, false};
}

namespace {

bool nearly_equal_sorted(std::vector<double> a, std::vector<double> b, double tol) {
    if (a.size() != b.size()) return false;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::fabs(a[i] - b[i]) > tol) return false;
    return true;
}

}  // namespace

SymmetryResult output_symmetry(const Dmc& w, double tol) {
    const std::size_t nx = w.input_size(), ny = w.output_size();

    std::vector<std::vector<double>> col_keys(ny);
    for (std::size_t y = 0; y < ny; ++y) {
        col_keys[y].resize(nx);
        for (std::size_t x = 0; x < nx; ++x) col_keys[y][x] = w(x, y);
        std::sort(col_keys[y].begin(), col_keys[y].end());
    }

    std::vector<std::size_t> order(ny);
    for (std::size_t y = 0; y < ny; ++y) order[y] = y;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::lexicographical_compare(col_keys[a].begin(), col_keys[a].end(),
                                            col_keys[b].begin(), col_keys[b].end());
    });

    std::vector<std::vector<std::size_t>> partition;
    for (std::size_t idx = 0; idx < ny; ++idx) {
        const std::size_t y = order[idx];
        bool appended = false;
        if (!partition.empty()) {
            const std::size_t prev = partition.back().back();
            double max_diff = 0.0;
            for (std::size_t x = 0; x < nx; ++x)
                max_diff = std::max(max_diff, std::fabs(col_keys[y][x] - col_keys[prev][x]));
            if (max_diff <= tol) {
                partition.back().push_back(y);
                appended = true;
            }
        }
        if (!appended) partition.push_back({y});
    }
    for (auto& group : partition) std::sort(group.begin(), group.end());
    std::sort(partition.begin(), partition.end());

    for (const auto& group : partition) {
        // rows of the submatrix must be permutations of one another
        std::vector<double> first_row;
        for (std::size_t x = 0; x < nx; ++x) {
            std::vector<double> row;
            row.reserve(group.size());
            for (std::size_t y : group) row.push_back(w(x, y));
            if (x == 0)
                first_row = row;
            else if (!nearly_equal_sorted(first_row, row, tol))
                return {false, {}};
        }
        // and columns likewise
        std::vector<double> first_col;
        for (std::size_t i = 0; i < group.size(); ++i) {
            std::vector<double> col(nx);
            for (std::size_t x = 0; x < nx; ++x) col[x] = w(x, group[i]);
            if (i == 0)
                first_col = col;
            else if (!nearly_equal_sorted(first_col, col, tol))
                return {false, {}};
        }
    }
    return {true, partition};
}

double kl_row(const Dmc& v, const Dmc& w, std::size_t x) {
    if (v.input_size() != w.input_size() || v.output_size() != w.output_size())
        throw std::invalid_argument("kl_row: alphabet mismatch");
    if (x >= v.input_size()) throw std::invalid_argument("kl_row: input symbol out of range");
    double total = 0.0;
    for (std::size_t y = 0; y < v.output_size(); ++y) {
        const double vy = v(x, y);
        if (vy == 0.0) continue;
        if (w(x, y) == 0.0) return infinity();
        total += vy * (std::log2(vy) - std::log2(w(x, y)));
    }
    return std::max(total, 0.0);
}

double conditional_kl(const Dmc& v, const Dmc& w, const InputDistribution& p) {
    if (p.size() != v.input_size())
        throw std::invalid_argument("conditional_kl: alphabet mismatch");
    double total = 0.0;
    for (std::size_t x = 0; x < v.input_size(); ++x) {
        if (p(x) == 0.0) continue;
        const double row = kl_row(v, w, x);
        if (row == infinity()) return infinity();
        total += p(x) * row;
    }
    return total;
}

ChannelSummary summarize(const Dmc& w, double tol) {
    const auto cap = capacity(w, tol);
    const auto disp = dispersion(w, tol);
    const auto sym = output_symmetry(w);
    return {cap.capacity_bits, cap.input, disp.dispersion_bits2, sym.symmetric, tol};
}

}  // namespace streamx
