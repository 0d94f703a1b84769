#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mwlab/grid.hpp"

namespace mwlab {

/// Grid-sampled matrix weight: a Hermitian positive definite d x d matrix at
/// every grid point, together with the pointwise inverses. Storage per point
/// is column-major: values[p*d*d + c*d + r] is entry (r, c) of W(p).
struct WeightField {
    GridSpec grid;
    int d = 1;
    std::vector<cplx> values;
    std::vector<cplx> inverse_values;

    static WeightField identity(const GridSpec& grid, int d);

    /// Builds the field from raw samples: hermitizes, validates positivity
    /// and the condition cap, and fills the pointwise inverses.
    static WeightField from_samples(const GridSpec& grid, int d, std::vector<cplx> samples,
                                    Exec exec = Exec::par);

    CMat value(std::int64_t p) const {
        CMat a(d, d);
        for (int c = 0; c < d; ++c)
            for (int r = 0; r < d; ++r) a(r, c) = values[p * d * d + c * d + r];
        return a;
    }
    CMat inverse(std::int64_t p) const {
        CMat a(d, d);
        for (int c = 0; c < d; ++c)
            for (int r = 0; r < d; ++r) a(r, c) = inverse_values[p * d * d + c * d + r];
        return a;
    }

    double max_condition() const;
};

enum class WeightFamily {
    identity,
    scalar_oscillation,
    diagonal_exp,
    rotated_diagonal,
    random_smooth,
};

WeightFamily weight_family_from_string(const std::string& name);
std::string to_string(WeightFamily family);

/// Test-weight generator.
///   identity            -> Id
///   scalar_oscillation  (eps)         -> (1 + eps sin(2 pi x1 / L)) Id, eps < 1
///   diagonal_exp        (eps)         -> diag(e^{eps s}, e^{-eps s}, 1, ...), s = sin(2 pi x1/L)
///   rotated_diagonal    (eps, theta)  -> U(theta) diagonal_exp(eps) U(theta)*
///   random_smooth       (eps, cutoff) -> exp of a random Hermitian trigonometric
///                                        polynomial, coefficient size eps, |k| <= cutoff
WeightField make_family(WeightFamily family, const std::vector<double>& params,
                        const GridSpec& grid, int d, std::uint64_t seed = 0,
                        Exec exec = Exec::par);

/// Periodized Gaussian bump direction * sum_nu exp(-|x - center + nu L|^2 / (2 width^2)).
/// width must lie in [3h, L/8] so the bump is resolvable and the wraparound
/// tail is negligible.
VectorField bump_vector_field(const std::vector<double>& center, double width,
                              const CVec& direction, const GridSpec& grid);

/// Weighted L2 norm sqrt(h^m sum_p (W(p) f(p), f(p))).
double weighted_norm2(const VectorField& f, const WeightField& w);
/// Same with the pointwise inverse weight.
double inverse_weighted_norm2(const VectorField& g, const WeightField& w);

/// Leaf list for the dyadic modules: an m = 1 field restricted to its 2^N
/// samples, assigned left to right on [0,1).
std::vector<CMat> dyadic_leaves_from_field(const WeightField& w);

/// Halves the leaf count by pairwise averaging until `target` leaves remain.
std::vector<CMat> coarsen_leaves(std::vector<CMat> leaves, std::size_t target);

}  // namespace mwlab
