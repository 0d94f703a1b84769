#pragma once

#include <cstdint>
#include <vector>

#include "mwlab/weight_field.hpp"

namespace mwlab {

/// Signed subset of axes {1..m}: axes[i] is a distinct 1-based axis index,
/// signs[i] in {-1, +1}.
struct SignPattern {
    std::vector<int> axes;
    std::vector<int> signs;

    void validate(int m) const;
    /// All 3^m - 1 nonempty signed subsets (8 for m = 2).
    static std::vector<SignPattern> all_nonempty(int m);
};

/// Fourier multiplier operator on the grid: componentwise multiplication of
/// the transform by symbol(xi); the zero mode is always annihilated.
struct MultiplierOp {
    GridSpec grid;
    std::vector<cplx> symbol;  // indexed by flat frequency position

    /// Riesz transform R_axis, symbol -i xi_axis / |xi| (axis is 1-based).
    /// The unpaired Nyquist row is zeroed to keep real data real.
    static MultiplierOp riesz(const GridSpec& grid, int axis);
    /// Signed sum of Riesz squares, symbol -sum_i sign_i xi_{j_i}^2 / |xi|^2.
    static MultiplierOp riesz_square_sum(const GridSpec& grid, const SignPattern& pattern);

    MultiplierOp adjoint() const;

    /// max_xi |symbol(xi)| — the exact unweighted L2 operator norm of a
    /// multiplier on the discrete torus.
    double unweighted_norm() const;
};

VectorField apply_multiplier(const MultiplierOp& op, const VectorField& f,
                             Exec exec = Exec::par);

struct PowerIterOptions {
    int iters = 2000;
    double tol = 1e-8;
    int restarts = 3;
    std::uint64_t seed = 1;
};

struct PowerIterResult {
    double norm = 0.0;
    int iterations = 0;
    double last_gap = 0.0;
    bool converged = false;
};

/// Weighted operator norm ||T||_{L2(W)}: the spectral norm of
/// S = M_{W^{1/2}} T M_{W^{-1/2}} on mean-zero fields, estimated by power
/// iteration on S*S with seeded restarts (max over restarts). Throws
/// numeric_error (with the last Rayleigh gap) if no restart converges.
double weighted_norm(const MultiplierOp& op, const WeightField& w,
                     const PowerIterOptions& options = {}, PowerIterResult* details = nullptr,
                     Exec exec = Exec::par);

/// Discrete quadratic form h^m sum_p (T phi (p), psi(p)).
cplx riesz_square_quadratic_form(const MultiplierOp& op, const VectorField& phi,
                                 const VectorField& psi, Exec exec = Exec::par);

}  // namespace mwlab
