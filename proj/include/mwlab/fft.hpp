#pragma once

#include <vector>

#include "mwlab/grid.hpp"

namespace mwlab {

/// In-place DFT on the grid. Forward is unnormalized; inverse carries the
/// 1/N factor, so inverse(forward(f)) == f. Thread-safe: plans are cached
/// per grid under a lock, execution runs lock-free.
void fft_inplace(const GridSpec& grid, cplx* data, bool inverse);

/// Frequency-domain view of a multi-component field. Components are stored
/// in separate blocks: hat[c * points + k].
struct SpectralField {
    GridSpec grid;
    int comps = 1;
    std::vector<cplx> hat;

    /// Forward transforms of an interleaved field (values[p*comps + c]).
    static SpectralField analyze(const GridSpec& grid, int comps,
                                 const std::vector<cplx>& interleaved, Exec exec = Exec::par);

    /// Heat slice at height t: inverse transform of exp(-t |xi|^2) hat,
    /// written interleaved into out.
    void heat_slice_into(double t, std::vector<cplx>& out, Exec exec = Exec::par) const;

    /// Spatial-derivative heat slice: multiplier i xi_axis exp(-t |xi|^2).
    void gradient_heat_slice_into(int axis, double t, std::vector<cplx>& out,
                                  Exec exec = Exec::par) const;

    /// Heat extension evaluated off-grid at x (trigonometric interpolation):
    /// one value per component.
    std::vector<cplx> eval_heat_at(const std::array<double, 2>& x, double t) const;
};

}  // namespace mwlab
