#pragma once

#include <array>
#include <vector>

#include "mwlab/heat.hpp"

namespace mwlab {

/// Both sides of the Littlewood-Paley estimate for one (f, g, W) triple.
struct LPReport {
    double lhs = 0.0;         // half-space integral of summed |gradient pairings|
    double rhs_f = 0.0;       // ||f||_{2,W}
    double rhs_g = 0.0;       // ||g||_{2,W^{-1}}
    double ratio = 0.0;       // lhs / (rhs_f * rhs_g)
    double tail_bound = 0.0;  // truncation error above t_max
};

/// 2 * integral over the upper half-space of sum_i |(d_i f^h, d_i g^h)|.
/// Quadrature: one trapezoid cell on [0, t_min] (the integrand is smooth at
/// t = 0) plus the log-spaced trapezoid rule of `tgrid`; the tail above
/// t_max is bounded analytically through the smallest nonzero frequency and
/// reported. Inputs must be mean-zero to 1e-12 of their norm.
double lp_lhs(const VectorField& f, const VectorField& g, const TimeGrid& tgrid,
              Exec exec = Exec::par, double* tail_bound = nullptr);

/// Full report; throws numeric_error when the tail bound exceeds 1% of the
/// integral (t_max too small).
LPReport lp_report(const VectorField& f, const VectorField& g, const WeightField& w,
                   const TimeGrid& tgrid, Exec exec = Exec::par);

struct DualityReport {
    double quadratic_form = 0.0;   // h^m sum (R_i^2 phi, psi)
    double gradient_pairing = 0.0; // -2 integral of d_i phi^h . d_i psi^h
    double residual = 0.0;         // |difference| / max(|lhs|, |rhs|, floor)
};

/// Checks the identity between the squared-Riesz quadratic form and the
/// signed heat-gradient pairing for real mean-zero profiles. The two sides
/// go through independent code paths (Fourier multiplier vs. time
/// quadrature of gradient slices). Residual above 1e-3 fails the check.
DualityReport duality_check(const VectorField& phi, const VectorField& psi, int axis,
                            const TimeGrid& tgrid, Exec exec = Exec::par);

/// One sampled point of the Bellman trajectory with its domain margins.
struct TrajectorySample {
    std::array<double, 2> x{0.0, 0.0};
    double t = 0.0;
    double margin_x = 0.0;      // min eig of X s - x x*
    double margin_y = 0.0;      // min eig of Y r - y y*
    double margin_lower = 0.0;  // ||r^{1/2} s^{1/2}|| - 1
    double margin_upper = 0.0;  // 1 + delta - ||r^{1/2} s^{1/2}||
    bool inside = false;
};

struct TrajectoryReport {
    double delta = 0.0;  // heat characteristic - 1 (sample values folded in)
    int violations = 0;
    double min_margin = 0.0;
    std::vector<TrajectorySample> samples;
};

/// Assembles the 6-tuple ((Wf,f)^h, (W^-1 g,g)^h, f^h, g^h, W^h, (W^-1)^h)
/// at each sample and checks membership in the delta-domain, where delta is
/// the heat characteristic minus one. Violations are data, not errors.
TrajectoryReport bellman_trajectory(const WeightField& w, const VectorField& f,
                                    const VectorField& g,
                                    const std::vector<std::array<double, 3>>& samples,
                                    const TimeGrid& tgrid, Exec exec = Exec::par);

}  // namespace mwlab
