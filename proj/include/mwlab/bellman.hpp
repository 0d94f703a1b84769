#pragma once

#include <cstdint>
#include <vector>

#include "mwlab/dyadic.hpp"

namespace mwlab {

/// A point of the Bellman domain: scalars X, Y >= 0, vectors x, y in C^d,
/// Hermitian PD matrices r, s.
struct BellmanPoint {
    double X = 0.0;
    double Y = 0.0;
    CVec x;
    CVec y;
    CMat r;
    CMat s;
};

struct DomainMargins {
    double margin_x = 0.0;      // min eig of X s - x x*
    double margin_y = 0.0;      // min eig of Y r - y y*
    double margin_lower = 0.0;  // ||r^{1/2} s^{1/2}|| - 1
    double margin_upper = 0.0;  // 1 + delta - ||r^{1/2} s^{1/2}||
    double product_norm = 0.0;

    bool inside(double tol = kTolPsd) const {
        return margin_x >= -tol && margin_y >= -tol && margin_lower >= -tol &&
               margin_upper >= -tol;
    }
};

/// Membership in the delta-domain. The all-directions vector constraints
/// |(x,e)| <= X^{1/2} (s e, e)^{1/2} and |(y,e)| <= Y^{1/2} (r e, e)^{1/2}
/// reduce to the semidefinite checks X s - x x* >= 0 and Y r - y y* >= 0;
/// the norm bracket is 1 <= ||r^{1/2} s^{1/2}|| <= 1 + delta. Margins are
/// always returned; `inside` applies the kTolPsd slack.
DomainMargins in_domain(const BellmanPoint& point, double delta);

/// A weight tree with step functions f, g on its leaves: a witness for the
/// supremum that defines the Bellman function. The derived point lies in
/// the delta-domain with delta = dyadic_a2(tree) - 1 (Cauchy-Schwarz).
struct WitnessConfig {
    DyadicWeightTree tree;
    HaarExpansion f;
    HaarExpansion g;

    /// (X, Y, x, y, r, s) = (int (Wf,f), int (W^-1 g,g), <f>, <g>, <W>_J, <W^-1>_J).
    BellmanPoint derived_point() const;
};

WitnessConfig make_witness(DyadicWeightTree tree, const std::vector<CVec>& f_leaves,
                           const std::vector<CVec>& g_leaves);

/// The witness's value: the dualized bilinear sum, a lower bound for the
/// Bellman function at the derived point.
double witness_value(const WitnessConfig& config);

/// Places a_plus on the right half and a_minus on the left half of a new
/// root interval. The derived point is the average of the two input points;
/// throws numeric_error (with margins in the message) if that average falls
/// outside the delta-domain. delta < 0 means "use dyadic_a2 of the
/// concatenated tree minus one", which never throws.
WitnessConfig concat_witnesses(const WitnessConfig& a_plus, const WitnessConfig& a_minus,
                               double delta = -1.0);

struct SizeBoundRow {
    double delta = 0.0;
    double max_ratio = 0.0;   // max of value / (X^{1/2} Y^{1/2})
    double c_delta = 0.0;     // (max_ratio - 1) / sqrt(delta)
    bool band_hit = false;    // the sampler reached dyadic_a2 - 1 in [delta/2, delta]
    int samples = 0;
};

/// For each delta: random witness configs with characteristic excess at most
/// delta (weights calibrated by bisection within the test families, Haar
/// coefficients normal, X = Y = 1 after rescaling), recording the worst
/// value-to-size ratio and the implied c_delta.
std::vector<SizeBoundRow> size_bound_sweep(const std::vector<double>& delta_grid,
                                           int per_delta_samples, std::uint64_t seed,
                                           Exec exec = Exec::par);

}  // namespace mwlab
