#pragma once

#include <array>
#include <vector>

#include "mwlab/fft.hpp"
#include "mwlab/weight_field.hpp"

namespace mwlab {

/// Log-spaced quadrature nodes in [t_min, t_max] with trapezoid weights taken
/// directly in t on the non-uniform nodes, so the weights are positive and
/// telescope exactly to t_max - t_min.
struct TimeGrid {
    double t_min = 0.0;
    double t_max = 0.0;
    std::vector<double> nodes;
    std::vector<double> weights;

    static TimeGrid log_spaced(double t_min, double t_max, int count);
    /// Defaults tied to the grid: t_min = h^2/4 (below it slices equal the
    /// data to quadrature tolerance), t_max = L^2 (above it slices are flat).
    static TimeGrid for_grid(const GridSpec& grid, int count = 96);

    int count() const { return static_cast<int>(nodes.size()); }
};

/// Heat extension u(. , t) = k_t * u0, computed as the dual-lattice
/// multiplier exp(-t |xi|^2).
VectorField heat_slice(const VectorField& input, double t, Exec exec = Exec::par);

/// Matrix version; validates that every slice sample stays positive definite.
WeightField heat_slice(const WeightField& input, double t, Exec exec = Exec::par);

/// Heat slice at height t of the scalar field p -> (W(p) f(p), f(p)).
/// The result is real and nonnegative within kTolPsd.
VectorField heat_pairing_field(const WeightField& w, const VectorField& f, double t,
                               Exec exec = Exec::par);

/// Cached spectra of W and W^{-1} plus point evaluation of their heat
/// extensions anywhere on the upper half-space.
class WeightHeat {
  public:
    WeightHeat(const WeightField& w, Exec exec = Exec::par);

    const GridSpec& grid() const { return grid_; }
    int dim() const { return d_; }

    CMat value_at(const std::array<double, 2>& x, double t) const;
    CMat inverse_at(const std::array<double, 2>& x, double t) const;
    /// || (W^h)^{1/2} ((W^{-1})^h)^{1/2} || at (x, t).
    double product_norm_at(const std::array<double, 2>& x, double t) const;

    const SpectralField& weight_spectrum() const { return w_hat_; }
    const SpectralField& inverse_spectrum() const { return winv_hat_; }

  private:
    GridSpec grid_;
    int d_;
    SpectralField w_hat_;
    SpectralField winv_hat_;
};

struct A2Result {
    double value = 1.0;
    std::array<double, 2> arg_x{0.0, 0.0};
    double arg_t = 0.0;
    /// Maximum after each refinement round (non-decreasing).
    std::vector<double> refine_values;
};

/// Heat A2 characteristic sup_{(x,t)} || (W^h)^{1/2} ((W^{-1})^h)^{1/2} ||:
/// grid scan over all points and time nodes, then `refine` rounds of local
/// search around the argmax. Always >= 1 - kTolPsd.
double heat_a2_characteristic(const WeightField& w, const TimeGrid& tgrid, int refine,
                              Exec exec = Exec::par, A2Result* details = nullptr);

}  // namespace mwlab
