#include "streamx/exponents.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace streamx {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_sum_exp(std::span<const double> terms) {
    double m = kNegInf;
    for (double t : terms) m = std::max(m, t);
    if (m == kNegInf) return kNegInf;
    double s = 0.0;
    for (double t : terms) s += std::exp(t - m);
    return m + std::log(s);
}

// Rows renormalized exactly so the Dmc validator accepts solver output.
Dmc make_dmc(std::size_t nx, std::size_t ny, std::vector<double> m) {
    for (std::size_t x = 0; x < nx; ++x) {
        double sum = 0.0;
        for (std::size_t y = 0; y < ny; ++y) {
            double& v = m[x * ny + y];
            if (v < 0.0) v = 0.0;
            sum += v;
        }
        std::size_t top = 0;
        for (std::size_t y = 0; y < ny; ++y) {
            m[x * ny + y] /= sum;
            if (m[x * ny + y] > m[x * ny + top]) top = y;
        }
        double resid = 1.0;
        for (std::size_t y = 0; y < ny; ++y)
            if (y != top) resid -= m[x * ny + y];
        m[x * ny + top] = std::max(resid, 0.0);
    }
    return {nx, ny, std::move(m)};
}

// ---------------------------------------------------------------------------
// Gallager E0(rho) = max_P E0(rho, P), solved as the convex minimization of
// F(P) = sum_y (sum_x P(x) W(y|x)^{1/(1+rho)})^{1+rho} over the input simplex
// by exponentiated gradient.  With a_x = sum_y A(x,y) alpha_y^rho and Euler's
// identity sum_x P(x) a_x = F, every iterate certifies
//     F(P) >= F* >= (1+rho) min_x a_x(P) - rho F(P),
// which is the stopping rule.

struct E0State {
    double log_f;
    std::vector<double> log_a;      // per input
    std::vector<double> log_alpha;  // per output
    double gap_ratio;               // (1+rho)(1 - min_x a_x / F)
};

struct E0Solver {
    const Dmc& w;
    double rho;
    std::size_t nx, ny;
    std::vector<double> log_a_mat;  // log W^{1/(1+rho)}

    E0Solver(const Dmc& w_in, double rho_in)
        : w(w_in), rho(rho_in), nx(w_in.input_size()), ny(w_in.output_size()) {
        log_a_mat.resize(nx * ny);
        for (std::size_t x = 0; x < nx; ++x)
            for (std::size_t y = 0; y < ny; ++y) {
                const double wxy = w(x, y);
                log_a_mat[x * ny + y] = wxy > 0.0 ? std::log(wxy) / (1.0 + rho) : kNegInf;
            }
    }

    E0State evaluate(const std::vector<double>& p) const {
        E0State st;
        st.log_alpha.assign(ny, kNegInf);
        std::vector<double> terms(nx);
        for (std::size_t y = 0; y < ny; ++y) {
            for (std::size_t x = 0; x < nx; ++x)
                terms[x] = p[x] > 0.0 ? std::log(p[x]) + log_a_mat[x * ny + y] : kNegInf;
            st.log_alpha[y] = log_sum_exp(terms);
        }
        std::vector<double> fterms(ny);
        for (std::size_t y = 0; y < ny; ++y)
            fterms[y] = st.log_alpha[y] == kNegInf ? kNegInf : (1.0 + rho) * st.log_alpha[y];
        st.log_f = log_sum_exp(fterms);
        st.log_a.assign(nx, kNegInf);
        std::vector<double> aterms(ny);
        for (std::size_t x = 0; x < nx; ++x) {
            for (std::size_t y = 0; y < ny; ++y)
                aterms[y] = (st.log_alpha[y] == kNegInf || log_a_mat[x * ny + y] == kNegInf)
                                ? kNegInf
                                : log_a_mat[x * ny + y] + rho * st.log_alpha[y];
            st.log_a[x] = log_sum_exp(aterms);
        }
        double min_ratio = std::numeric_limits<double>::infinity();
        for (std::size_t x = 0; x < nx; ++x)
            min_ratio = std::min(min_ratio, std::exp(st.log_a[x] - st.log_f));
        st.gap_ratio = (1.0 + rho) * (1.0 - min_ratio);
        return st;
    }
};

struct E0Result {
    double e0_bits;
    std::vector<double> input;
    std::vector<double> log_alpha;
    double gap_bits;
};

E0Result gallager_e0(const Dmc& w, double rho, double tol_bits,
                     std::vector<double> warm_start = {}) {
    const std::size_t nx = w.input_size();
    std::vector<double> p = warm_start.size() == nx
                                ? std::move(warm_start)
                                : std::vector<double>(nx, 1.0 / static_cast<double>(nx));
    // multiplicative updates cannot revive an exactly-zero coordinate
    {
        double norm = 0.0;
        for (auto& v : p) {
            v = std::max(v, 1e-9);
            norm += v;
        }
        for (auto& v : p) v /= norm;
    }
    E0Solver solver(w, rho);
    auto st = solver.evaluate(p);
    if (rho == 0.0) return {0.0, std::move(p), st.log_alpha, 0.0};

    if (nx == 2) {
        // 1-D convex problem: golden-section on log F(p0)
        constexpr double kG = 0.6180339887498949;
        const auto logf_at = [&](double p0) {
            return solver.evaluate({p0, 1.0 - p0}).log_f;
        };
        double lo = 0.0, hi = 1.0;
        double x1 = hi - kG * (hi - lo), x2 = lo + kG * (hi - lo);
        double f1 = logf_at(x1), f2 = logf_at(x2);
        for (int it = 0; it < 120 && (hi - lo) > 1e-15; ++it) {
            if (f1 > f2) {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + kG * (hi - lo);
                f2 = logf_at(x2);
            } else {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - kG * (hi - lo);
                f1 = logf_at(x1);
            }
        }
        const double p0 = 0.5 * (lo + hi);
        p = {p0, 1.0 - p0};
        st = solver.evaluate(p);
        return {-st.log_f / std::numbers::ln2, std::move(p), st.log_alpha,
                std::max(st.gap_ratio, 0.0) / std::numbers::ln2};
    }

    const double stop = std::max(tol_bits * std::numbers::ln2, 1e-13);
    double eta = 1.0;
    constexpr std::size_t max_iter = 4'000;
    for (std::size_t it = 0; it < max_iter && st.gap_ratio > stop; ++it) {
        bool accepted = false;
        for (int bt = 0; bt < 40; ++bt) {
            std::vector<double> q(nx);
            double norm = 0.0;
            for (std::size_t x = 0; x < nx; ++x) {
                const double ratio = std::exp(st.log_a[x] - st.log_f);
                q[x] = p[x] * std::exp(-eta * (1.0 + rho) * (ratio - 1.0));
                norm += q[x];
            }
            if (!(norm > 0.0) || !std::isfinite(norm)) {
                eta *= 0.5;
                continue;
            }
            for (auto& v : q) v /= norm;
            const auto cand = solver.evaluate(q);
            if (cand.log_f <= st.log_f) {
                p = std::move(q);
                st = cand;
                eta = std::min(eta * 1.25, 64.0);
                accepted = true;
                break;
            }
            eta *= 0.5;
        }
        if (!accepted) break;  // numerical floor reached
    }
    return {-st.log_f / std::numbers::ln2, std::move(p), st.log_alpha,
            std::max(st.gap_ratio, 0.0) / std::numbers::ln2};
}

// Tilted channel V(y|x) ~ W(y|x)^{1/(1+rho)} Q(y)^{rho/(1+rho)} with output
// law Q ~ alpha^{1+rho}.
Dmc tilted_channel(const Dmc& w, double rho, std::span<const double> log_alpha) {
    const std::size_t nx = w.input_size(), ny = w.output_size();
    std::vector<double> log_q(ny);
    {
        std::vector<double> t(ny);
        for (std::size_t y = 0; y < ny; ++y)
            t[y] = log_alpha[y] == kNegInf ? kNegInf : (1.0 + rho) * log_alpha[y];
        const double norm = log_sum_exp(t);
        for (std::size_t y = 0; y < ny; ++y)
            log_q[y] = t[y] == kNegInf ? kNegInf : t[y] - norm;
    }
    std::vector<double> m(nx * ny, 0.0);
    const double s = rho / (1.0 + rho);
    for (std::size_t x = 0; x < nx; ++x) {
        std::vector<double> lt(ny, kNegInf);
        for (std::size_t y = 0; y < ny; ++y) {
            const double wxy = w(x, y);
            if (wxy > 0.0 && log_q[y] != kNegInf)
                lt[y] = std::log(wxy) / (1.0 + rho) + s * log_q[y];
        }
        const double norm = log_sum_exp(lt);
        for (std::size_t y = 0; y < ny; ++y)
            if (lt[y] != kNegInf) m[x * ny + y] = std::exp(lt[y] - norm);
    }
    return make_dmc(nx, ny, std::move(m));
}

// Rank-one channel with every row equal to q; capacity zero.
Dmc rank_one_channel(std::size_t nx, std::vector<double> q) {
    const std::size_t ny = q.size();
    std::vector<double> m(nx * ny);
    for (std::size_t x = 0; x < nx; ++x)
        for (std::size_t y = 0; y < ny; ++y) m[x * ny + y] = q[y];
    return make_dmc(nx, ny, std::move(m));
}

Dmc blend(const Dmc& a, const Dmc& b, double t) {
    std::vector<double> m(a.input_size() * a.output_size());
    for (std::size_t x = 0; x < a.input_size(); ++x)
        for (std::size_t y = 0; y < a.output_size(); ++y)
            m[x * a.output_size() + y] = (1.0 - t) * a(x, y) + t * b(x, y);
    return make_dmc(a.input_size(), a.output_size(), std::move(m));
}

}  // namespace

const char* to_string(ExponentMethod m) {
    switch (m) {
        case ExponentMethod::primal_grid: return "primal_grid";
        case ExponentMethod::dual_gallager: return "dual_gallager";
        case ExponentMethod::symmetric_1d: return "symmetric_1d";
    }
    return "?";
}

ExponentResult sphere_packing_exponent(const Dmc& w, RatePoint r, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("sphere_packing_exponent: tol must be positive");
    const double rate = r.rate_bits;
    const auto cap = capacity(w, std::min(1e-10, tol * 1e-2));
    if (rate >= cap.capacity_bits) return {0.0, w, cap.input, ExponentMethod::dual_gallager, 0.0};

    const double e0_tol = std::min(1e-11, tol * 1e-3);
    std::vector<double> warm;
    const auto dual_value = [&](double rho) {
        auto res = gallager_e0(w, rho, e0_tol, warm);
        warm = res.input;
        return std::make_pair(res.e0_bits - rho * rate, std::move(res));
    };

    // coarse scan over rho with geometric spacing
    double best_rho = 0.0, best_val = 0.0, last_rho = 0.0;
    {
        std::size_t since_best = 0;
        for (double rho = 1e-4; rho <= 4096.0; rho *= 1.17) {
            last_rho = rho;
            const double val = dual_value(rho).first;
            if (val > best_val) {
                best_val = val;
                best_rho = rho;
                since_best = 0;
            } else if (++since_best > 24 && rho > 8.0 * std::max(best_rho, 1e-3)) {
                break;
            }
        }
        if (best_rho > 0.0 && best_rho * 1.17 > last_rho && last_rho > 2048.0)
            throw solver_error(
                "sphere_packing_exponent: dual line search did not bracket a maximum below "
                "rho = 4096 (the exponent may be infinite at this rate)",
                best_val);
    }

    // golden-section refinement around the best scan point
    double lo = std::max(best_rho / (1.17 * 1.17), 0.0);
    double hi = best_rho * 1.17 * 1.17;
    constexpr double kGolden = 0.6180339887498949;
    double x1 = hi - kGolden * (hi - lo);
    double x2 = lo + kGolden * (hi - lo);
    double f1 = dual_value(x1).first;
    double f2 = dual_value(x2).first;
    for (int it = 0; it < 200 && (hi - lo) > 1e-11 * (1.0 + hi); ++it) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + kGolden * (hi - lo);
            f2 = dual_value(x2).first;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - kGolden * (hi - lo);
            f1 = dual_value(x1).first;
        }
    }
    const double rho_star = 0.5 * (lo + hi);
    auto [value, e0res] = dual_value(rho_star);
    value = std::max({value, best_val, 0.0});

    const auto p_star = InputDistribution(e0res.input);
    Dmc v_star = tilted_channel(w, rho_star, e0res.log_alpha);

    // primal cross-check: force I(P*, V) <= R by blending toward the rank-one
    // output-law channel, then compare the feasible primal objective
    double gap = e0res.gap_bits;
    {
        Dmc v_feas = v_star;
        if (mutual_information(p_star, v_feas) > rate) {
            const Dmc flat = rank_one_channel(w.input_size(), output_distribution(p_star, v_star));
            double t_lo = 0.0, t_hi = 1.0;
            for (int i = 0; i < 100; ++i) {
                const double t = 0.5 * (t_lo + t_hi);
                Dmc cand = blend(v_star, flat, t);
                if (mutual_information(p_star, cand) <= rate) {
                    t_hi = t;
                    v_feas = std::move(cand);
                } else {
                    t_lo = t;
                }
            }
        }
        const double primal_at_v = conditional_kl(v_feas, w, p_star);
        if (std::isfinite(primal_at_v)) gap += std::max(0.0, primal_at_v - value);
    }

    return {value, std::move(v_star), p_star, ExponentMethod::dual_gallager, gap};
}

// ---------------------------------------------------------------------------
// Primal grid oracle (binary input).

namespace {

struct GridEval {
    double mi;
    double div;  // +inf when V escapes W's support
};

GridEval eval_point(const Dmc& w, const double* p, const double* v0, const double* v1,
                    std::size_t ny) {
    double pv[3];
    for (std::size_t y = 0; y < ny; ++y) pv[y] = p[0] * v0[y] + p[1] * v1[y];
    double mi = 0.0, div = 0.0;
    const double* rows[2] = {v0, v1};
    for (std::size_t x = 0; x < 2; ++x) {
        const double px = p[x];
        for (std::size_t y = 0; y < ny; ++y) {
            const double vxy = rows[x][y];
            if (vxy <= 0.0) continue;
            if (px > 0.0) mi += px * vxy * std::log2(vxy / pv[y]);
            const double wxy = w(x, y);
            if (wxy <= 0.0)
                div = std::numeric_limits<double>::infinity();
            else if (px > 0.0)
                div += px * vxy * std::log2(vxy / wxy);
        }
    }
    return {std::max(mi, 0.0), div};
}

std::vector<std::array<double, 3>> simplex_grid(std::size_t ny, std::size_t steps) {
    std::vector<std::array<double, 3>> pts;
    const double inv = 1.0 / static_cast<double>(steps);
    if (ny == 2) {
        pts.reserve(steps + 1);
        for (std::size_t i = 0; i <= steps; ++i)
            pts.push_back({static_cast<double>(i) * inv, 1.0 - static_cast<double>(i) * inv, 0.0});
    } else {
        pts.reserve((steps + 1) * (steps + 2) / 2);
        for (std::size_t i = 0; i <= steps; ++i)
            for (std::size_t j = 0; i + j <= steps; ++j)
                pts.push_back({static_cast<double>(i) * inv, static_cast<double>(j) * inv,
                               1.0 - static_cast<double>(i + j) * inv});
    }
    return pts;
}

std::vector<std::array<double, 3>> simplex_grid_local(std::size_t ny, std::size_t fine_steps,
                                                      const std::array<double, 3>& center,
                                                      double radius) {
    std::vector<std::array<double, 3>> pts;
    const double inv = 1.0 / static_cast<double>(fine_steps);
    const auto n = static_cast<long>(fine_steps);
    const auto lo_idx = [&](double c) {
        return std::max(static_cast<long>(std::floor((c - radius) * static_cast<double>(fine_steps))), 0L);
    };
    const auto hi_idx = [&](double c) {
        return std::min(static_cast<long>(std::ceil((c + radius) * static_cast<double>(fine_steps))), n);
    };
    if (ny == 2) {
        for (long i = lo_idx(center[0]); i <= hi_idx(center[0]); ++i)
            pts.push_back({static_cast<double>(i) * inv, 1.0 - static_cast<double>(i) * inv, 0.0});
    } else {
        for (long i = lo_idx(center[0]); i <= hi_idx(center[0]); ++i)
            for (long j = lo_idx(center[1]); j <= hi_idx(center[1]) && i + j <= n; ++j)
                pts.push_back({static_cast<double>(i) * inv, static_cast<double>(j) * inv,
                               1.0 - static_cast<double>(i + j) * inv});
    }
    return pts;
}

struct InnerMin {
    double value = std::numeric_limits<double>::infinity();
    std::array<double, 3> row0{}, row1{};
};

InnerMin min_over_rows(const Dmc& w, double rate, const double* p,
                       const std::vector<std::array<double, 3>>& g0,
                       const std::vector<std::array<double, 3>>& g1) {
    const std::size_t ny = w.output_size();
    InnerMin best;
    for (const auto& r0 : g0)
        for (const auto& r1 : g1) {
            const auto e = eval_point(w, p, r0.data(), r1.data(), ny);
            if (e.mi <= rate + 1e-15 && e.div < best.value) {
                best.value = e.div;
                best.row0 = r0;
                best.row1 = r1;
            }
        }
    return best;
}

}  // namespace

ExponentResult sphere_packing_primal(const Dmc& w, RatePoint r, const PrimalGridOptions& opt) {
    if (w.input_size() != 2)
        throw std::invalid_argument("sphere_packing_primal: binary input alphabets only");
    if (w.output_size() != 2 && w.output_size() != 3)
        throw std::invalid_argument("sphere_packing_primal: output alphabet must be 2 or 3");
    const std::size_t ny = w.output_size();
    const double rate = r.rate_bits;

    const std::size_t p_steps = opt.fine_steps;
    const bool two_stage = ny == 3;
    const std::size_t first_steps = two_stage ? opt.coarse_steps : opt.fine_steps;
    const auto grid = simplex_grid(ny, first_steps);

    std::vector<InnerMin> stage1(p_steps + 1);
    double stage1_best = -1.0;
    for (std::size_t pi = 0; pi <= p_steps; ++pi) {
        const double p0 = static_cast<double>(pi) / static_cast<double>(p_steps);
        const double p[2] = {p0, 1.0 - p0};
        stage1[pi] = min_over_rows(w, rate, p, grid, grid);
        if (std::isfinite(stage1[pi].value)) stage1_best = std::max(stage1_best, stage1[pi].value);
    }
    if (stage1_best < 0.0) throw solver_error("sphere_packing_primal: no feasible grid point", 0.0);

    double value = -1.0;
    std::size_t best_pi = 0;
    InnerMin best_inner;
    if (!two_stage) {
        for (std::size_t pi = 0; pi <= p_steps; ++pi)
            if (std::isfinite(stage1[pi].value) && stage1[pi].value > value) {
                value = stage1[pi].value;
                best_pi = pi;
                best_inner = stage1[pi];
            }
    } else {
        const double coarse_cell = 1.0 / static_cast<double>(first_steps);
        const double margin = 0.05 * (1.0 + stage1_best) + coarse_cell;
        for (std::size_t pi = 0; pi <= p_steps; ++pi) {
            if (!std::isfinite(stage1[pi].value) || stage1[pi].value < stage1_best - margin)
                continue;
            const double p0 = static_cast<double>(pi) / static_cast<double>(p_steps);
            const double p[2] = {p0, 1.0 - p0};
            const auto g0 = simplex_grid_local(ny, opt.fine_steps, stage1[pi].row0, 3.0 * coarse_cell);
            const auto g1 = simplex_grid_local(ny, opt.fine_steps, stage1[pi].row1, 3.0 * coarse_cell);
            const auto fine = min_over_rows(w, rate, p, g0, g1);
            if (std::isfinite(fine.value) && fine.value > value) {
                value = fine.value;
                best_pi = pi;
                best_inner = fine;
            }
        }
    }
    if (value < 0.0) throw solver_error("sphere_packing_primal: refinement found no feasible point", 0.0);

    const double p0 = static_cast<double>(best_pi) / static_cast<double>(p_steps);
    std::vector<double> m(2 * ny);
    for (std::size_t y = 0; y < ny; ++y) {
        m[y] = best_inner.row0[y];
        m[ny + y] = best_inner.row1[y];
    }
    const double step = 1.0 / static_cast<double>(opt.fine_steps);
    return {std::max(value, 0.0), make_dmc(2, ny, std::move(m)),
            InputDistribution({p0, 1.0 - p0}), ExponentMethod::primal_grid, step * step * 64.0};
}

// ---------------------------------------------------------------------------
// Haroutunian exponent.

namespace {

// Capacity upper bounds with a warm-started input; the feasibility tests call
// this on channels that change only slightly between evaluations.
class CapacityEvaluator {
  public:
    CapacityEvaluator(std::size_t nx, double tol)
        : tol_(tol), p_(nx, 1.0 / static_cast<double>(nx)) {}

    double upper(const Dmc& v) {
        const std::size_t nx = v.input_size(), ny = v.output_size();
        // revive collapsed warm-start coordinates; max_x D stays a valid
        // upper bound for any input, so the cap below is safe
        {
            double norm = 0.0;
            for (auto& px : p_) {
                px = std::max(px, 1e-9);
                norm += px;
            }
            for (auto& px : p_) px /= norm;
        }
        std::vector<double> pw(ny), d(nx);
        double upper_b = std::numeric_limits<double>::infinity();
        for (std::size_t iter = 0; iter < 5'000; ++iter) {
            std::fill(pw.begin(), pw.end(), 0.0);
            for (std::size_t x = 0; x < nx; ++x)
                for (std::size_t y = 0; y < ny; ++y) pw[y] += p_[x] * v(x, y);
            double lower = 0.0;
            upper_b = kNegInf;
            for (std::size_t x = 0; x < nx; ++x) {
                double dx = 0.0;
                for (std::size_t y = 0; y < ny; ++y) {
                    const double vxy = v(x, y);
                    if (vxy == 0.0) continue;
                    dx += vxy * (std::log2(vxy) - std::log2(pw[y]));
                }
                d[x] = dx;
                lower += p_[x] * dx;
                upper_b = std::max(upper_b, dx);
            }
            if (upper_b - lower <= tol_) return upper_b;
            double norm = 0.0;
            for (std::size_t x = 0; x < nx; ++x) {
                p_[x] *= std::exp2(d[x] - upper_b);
                norm += p_[x];
            }
            for (auto& px : p_) px /= norm;
        }
        return upper_b;
    }

  private:
    double tol_;
    std::vector<double> p_;
};

double max_row_kl(const Dmc& v, const Dmc& w, std::size_t* argmax = nullptr) {
    double best = -1.0;
    std::size_t arg = 0;
    for (std::size_t x = 0; x < v.input_size(); ++x) {
        const double d = kl_row(v, w, x);
        if (d > best) {
            best = d;
            arg = x;
        }
    }
    if (argmax) *argmax = arg;
    return best;
}

// Geometric-mean distribution over all-positive output columns: a rank-one
// anchor with capacity zero and finite divergence to every row of W.
std::vector<double> support_anchor(const Dmc& w) {
    const std::size_t nx = w.input_size(), ny = w.output_size();
    std::vector<double> q(ny, 0.0);
    double sum = 0.0;
    for (std::size_t y = 0; y < ny; ++y) {
        double lg = 0.0;
        bool ok = true;
        for (std::size_t x = 0; x < nx; ++x) {
            if (w(x, y) <= 0.0) {
                ok = false;
                break;
            }
            lg += std::log(w(x, y));
        }
        if (ok) {
            q[y] = std::exp(lg / static_cast<double>(nx));
            sum += q[y];
        }
    }
    if (sum <= 0.0) return {};
    for (auto& v : q) v /= sum;
    return q;
}

// Smallest blend toward the anchor that restores C(V) <= rate.
Dmc restore_feasible(const Dmc& v, const Dmc& anchor, double rate, CapacityEvaluator& cap) {
    if (cap.upper(v) <= rate) return v;
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 60; ++i) {
        const double t = 0.5 * (lo + hi);
        if (cap.upper(blend(v, anchor, t)) <= rate)
            hi = t;
        else
            lo = t;
    }
    return blend(v, anchor, hi);
}

// Euclidean projection of one row onto {p >= 0, sum p = 1, p_y = 0 off the
// support of the reference row}.
void project_row_to_simplex(std::span<double> row, std::span<const double> support) {
    std::vector<std::pair<double, std::size_t>> vals;
    for (std::size_t y = 0; y < row.size(); ++y)
        if (support[y] > 0.0) vals.push_back({row[y], y});
    std::sort(vals.begin(), vals.end(), std::greater<>());
    double cumsum = 0.0, theta = 0.0;
    for (std::size_t i = 0; i < vals.size(); ++i) {
        cumsum += vals[i].first;
        const double th = (cumsum - 1.0) / static_cast<double>(i + 1);
        if (vals[i].first - th > 0.0) theta = th;
    }
    for (std::size_t y = 0; y < row.size(); ++y) row[y] = 0.0;
    double sum = 0.0;
    for (const auto& [val, y] : vals) {
        const double p = std::max(val - theta, 0.0);
        row[y] = p;
        sum += p;
    }
    if (sum <= 0.0)
        for (const auto& [val, y] : vals) row[y] = 1.0 / static_cast<double>(vals.size());
    else
        for (const auto& [val, y] : vals) row[y] /= sum;
}

ExponentResult haroutunian_symmetric(const Dmc& w, double rate, double tol) {
    const std::size_t nx = w.input_size(), ny = w.output_size();
    const double log_unif = -std::log(static_cast<double>(nx));

    const auto family = [&](double rho) {
        std::vector<double> log_alpha(ny, kNegInf);
        std::vector<double> terms(nx);
        for (std::size_t y = 0; y < ny; ++y) {
            for (std::size_t x = 0; x < nx; ++x)
                terms[x] =
                    w(x, y) > 0.0 ? log_unif + std::log(w(x, y)) / (1.0 + rho) : kNegInf;
            log_alpha[y] = log_sum_exp(terms);
        }
        return tilted_channel(w, rho, log_alpha);
    };

    const double ctol = std::min(1e-12, tol * 1e-3);
    const auto cap_of = [&](double rho) { return capacity(family(rho), ctol).capacity_bits; };

    double lo = 0.0, hi = 1.0;
    while (cap_of(hi) > rate) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e9)
            throw solver_error("haroutunian_exponent: tilted family failed to reach the rate",
                               cap_of(1e6) - rate);
    }
    for (int i = 0; i < 200 && (hi - lo) > 1e-14 * (1.0 + hi); ++i) {
        const double mid = 0.5 * (lo + hi);
        if (cap_of(mid) <= rate)
            hi = mid;
        else
            lo = mid;
    }
    const Dmc v = family(hi);  // feasible side of the bracket
    std::size_t arg = 0;
    const double value = max_row_kl(v, w, &arg);
    const double lo_value = max_row_kl(family(lo), w);
    return {value, v, InputDistribution::point_mass(nx, arg), ExponentMethod::symmetric_1d,
            std::max(0.0, value - lo_value)};
}

ExponentResult haroutunian_general(const Dmc& w, double rate, double tol) {
    const std::size_t nx = w.input_size(), ny = w.output_size();
    const auto anchor_q = support_anchor(w);
    if (anchor_q.empty())
        throw solver_error(
            "haroutunian_exponent: no all-positive output column, the feasible set may be empty "
            "and the exponent infinite",
            0.0);
    const Dmc anchor = rank_one_channel(nx, anchor_q);

    const double ctol = std::max(1e-13, tol * 1e-3);
    CapacityEvaluator cap(nx, ctol);

    const auto sp = sphere_packing_exponent(w, RatePoint(rate), tol);

    std::vector<Dmc> seeds;
    seeds.push_back(restore_feasible(sp.optimizing_channel, anchor, rate, cap));
    seeds.push_back(anchor);
    for (double t : {0.5})
        seeds.push_back(restore_feasible(blend(sp.optimizing_channel, anchor, t), anchor, rate, cap));
    if (nx == 2 && ny <= 3) {
        const std::size_t steps = ny == 2 ? 40 : 12;
        const auto pts = simplex_grid(ny, steps);
        double best = std::numeric_limits<double>::infinity();
        Dmc best_v = anchor;
        for (const auto& r0 : pts)
            for (const auto& r1 : pts) {
                std::vector<double> m(2 * ny);
                bool support_ok = true;
                for (std::size_t y = 0; y < ny; ++y) {
                    m[y] = r0[y];
                    m[ny + y] = r1[y];
                    if ((r0[y] > 0.0 && w(0, y) == 0.0) || (r1[y] > 0.0 && w(1, y) == 0.0))
                        support_ok = false;
                }
                if (!support_ok) continue;
                Dmc v = make_dmc(2, ny, std::move(m));
                const double f = max_row_kl(v, w);
                if (f >= best) continue;
                if (cap.upper(v) <= rate) {
                    best = f;
                    best_v = std::move(v);
                }
            }
        if (std::isfinite(best)) seeds.push_back(std::move(best_v));
    }

    Dmc best_v = seeds.front();
    double best_f = max_row_kl(best_v, w);

    constexpr std::size_t iterations = 10'000;  // default per run
    for (const auto& seed : seeds) {
        Dmc v = seed;
        {
            const double f0 = max_row_kl(v, w);
            if (f0 < best_f) {
                best_f = f0;
                best_v = v;
            }
        }
        std::vector<double> m(v.matrix());
        const double scale = 0.05;
        for (std::size_t k = 1; k <= iterations; ++k) {
            std::size_t xs = 0;
            max_row_kl(v, w, &xs);
            const double alpha = scale / std::sqrt(static_cast<double>(k));
            for (std::size_t y = 0; y < ny; ++y) {
                if (w(xs, y) <= 0.0) continue;
                const double vxy = std::max(v(xs, y), 1e-12);
                double g = std::log2(vxy / w(xs, y)) + 1.0 / std::numbers::ln2;
                g = std::clamp(g, -50.0, 50.0);
                m[xs * ny + y] = v(xs, y) - alpha * g;
            }
            project_row_to_simplex({m.data() + xs * ny, ny}, w.row(xs));
            Dmc cand = make_dmc(nx, ny, m);
            if (cap.upper(cand) > rate) cand = restore_feasible(cand, anchor, rate, cap);
            m = cand.matrix();
            v = std::move(cand);
            const double f = max_row_kl(v, w);
            if (f < best_f) {
                best_f = f;
                best_v = v;
            }
        }
    }

    // pattern-search polish around the incumbent
    double polish_delta = 0.0;
    {
        Dmc v = best_v;
        double f = best_f;
        for (double step = 0.02; step > 1e-7; step *= 0.5) {
            bool improved = true;
            while (improved) {
                improved = false;
                for (std::size_t x = 0; x < nx; ++x)
                    for (std::size_t y1 = 0; y1 < ny; ++y1)
                        for (std::size_t y2 = 0; y2 < ny; ++y2) {
                            if (y1 == y2 || w(x, y1) <= 0.0 || w(x, y2) <= 0.0) continue;
                            if (v(x, y1) < step) continue;
                            auto m2 = v.matrix();
                            m2[x * ny + y1] -= step;
                            m2[x * ny + y2] += step;
                            Dmc cand = make_dmc(nx, ny, std::move(m2));
                            if (cap.upper(cand) > rate) continue;
                            const double fc = max_row_kl(cand, w);
                            if (fc < f - 1e-14) {
                                f = fc;
                                v = std::move(cand);
                                improved = true;
                            }
                        }
            }
        }
        polish_delta = best_f - f;
        if (f < best_f) {
            best_f = f;
            best_v = std::move(v);
        }
    }

    // feasibility certificate at the requested tolerance
    CapacityEvaluator cap_final(nx, std::min(1e-13, tol * 1e-4));
    if (cap_final.upper(best_v) > rate + 0.5 * tol)
        best_v = restore_feasible(best_v, anchor, rate + 0.5 * tol, cap_final);
    std::size_t arg = 0;
    const double value = max_row_kl(best_v, w, &arg);

    return {value, best_v, InputDistribution::point_mass(nx, arg), ExponentMethod::primal_grid,
            std::max(polish_delta, 0.0)};
}

}  // namespace

ExponentResult haroutunian_exponent(const Dmc& w, RatePoint r, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("haroutunian_exponent: tol must be positive");
    const auto cap = capacity(w, std::min(1e-10, tol * 1e-2));
    if (r.rate_bits >= cap.capacity_bits)
        return {0.0, w, InputDistribution::point_mass(w.input_size(), 0),
                ExponentMethod::symmetric_1d, 0.0};
    if (output_symmetry(w).symmetric) return haroutunian_symmetric(w, r.rate_bits, tol);
    return haroutunian_general(w, r.rate_bits, tol);
}

ExponentResult auxiliary_channel(const Dmc& w, RatePoint r, double tol) {
    return haroutunian_exponent(w, r, tol);
}

std::vector<std::pair<double, double>> sp_ratio_probe(const Dmc& w,
                                                      std::span<const double> rho_list,
                                                      double tol) {
    const auto cap = capacity(w, std::min(1e-10, tol * 1e-2));
    std::vector<std::pair<double, double>> out;
    out.reserve(rho_list.size());
    const double log2e = 1.0 / std::numbers::ln2;
    for (double rho : rho_list) {
        if (!(rho > 0.0) || rho >= cap.capacity_bits)
            throw std::invalid_argument("sp_ratio_probe: rho must lie in (0, C)");
        const auto e = sphere_packing_exponent(w, RatePoint(cap.capacity_bits - rho), tol);
        out.emplace_back(rho, e.value_bits / (rho * rho * log2e));
    }
    return out;
}

}  // namespace streamx
