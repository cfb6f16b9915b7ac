#pragma once

#include <span>
#include <utility>
#include <vector>

#include "streamx/channel.hpp"

// Error-exponent solvers: the sphere-packing exponent (Gallager dual plus a
// brute-force primal grid oracle), the Haroutunian exponent, its argmin
// channel, and a second-order ratio probe.

namespace streamx {

struct RatePoint {
    explicit RatePoint(double bits) : rate_bits(bits) {
        if (!(bits >= 0.0)) throw std::invalid_argument("RatePoint: rate must be >= 0");
    }
    double rate_bits;
};

enum class ExponentMethod { primal_grid, dual_gallager, symmetric_1d };

const char* to_string(ExponentMethod m);

struct ExponentResult {
    double value_bits;
    Dmc optimizing_channel;        // the V achieving the min, when applicable
    InputDistribution optimizing_input;
    ExponentMethod method;
    double gap_estimate;           // solver diagnostics, >= 0
};

// E_sp(R) = max_P min_{V : I(P,V) <= R} D(V||W|P), computed through the
// Gallager dual sup_{rho >= 0} [E0(rho) - rho R].  The result carries the
// tilted channel reconstructed from the optimal rho and a primal-feasibility
// cross-check as gap_estimate.
ExponentResult sphere_packing_exponent(const Dmc& w, RatePoint r, double tol = 1e-9);

struct PrimalGridOptions {
    std::size_t fine_steps = 200;    // per-coordinate grid resolution
    std::size_t coarse_steps = 25;   // first stage for 3-letter output rows
};

// Brute-force primal evaluation of E_sp on a channel-simplex grid; the
// independent oracle for the dual path.  Binary input alphabets only.
ExponentResult sphere_packing_primal(const Dmc& w, RatePoint r, const PrimalGridOptions& opt = {});

// E+(R) = min_{V : C(V) <= R} max_x D(V(.|x)||W(.|x)).  Output-symmetric
// channels use the one-parameter tilted family; the general case runs
// projected subgradient descent with feasibility restoration, seeded from the
// sphere-packing dual's tilted channel.  The returned V satisfies
// C(V) <= R + tol.
ExponentResult haroutunian_exponent(const Dmc& w, RatePoint r, double tol = 1e-9);

// Same optimization with the argmin channel as the primary output.
ExponentResult auxiliary_channel(const Dmc& w, RatePoint r, double tol = 1e-9);

// (rho, E_sp(C - rho) / (rho^2 log2 e)) for each rho.  The exponent is put on
// the natural-log scale so the small-rho limit is exactly 1/(2 nu) with nu
// the channel dispersion in bits^2.
std::vector<std::pair<double, double>> sp_ratio_probe(const Dmc& w,
                                                      std::span<const double> rho_list,
                                                      double tol = 1e-9);

}  // namespace streamx
