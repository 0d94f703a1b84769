#pragma once

#include <Eigen/Dense>
#include <complex>

#include "mwlab/errors.hpp"

namespace mwlab {

using cplx = std::complex<double>;

/// Fiber dimension cap. Every matrix in the lab is at most 8x8, so all
/// small-matrix values live on the stack.
inline constexpr int kMaxDim = 8;

using CMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;
using CVec = Eigen::Matrix<cplx, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using RVec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;

/// Relative tolerance of the small-matrix decompositions.
inline constexpr double kTolLin = 1e-10;
/// Absolute tolerance for semidefiniteness checks.
inline constexpr double kTolPsd = 1e-9;
/// Condition-number cap beyond which a weight sample counts as degenerate.
inline constexpr double kCondCap = 1e8;

/// (a + a*)/2. All decompositions symmetrize first; spectral quadrature can
/// leave sub-tolerance asymmetry in otherwise Hermitian data.
CMat hermitize(const CMat& a);

struct EigH {
    RVec values;   // ascending
    CMat vectors;  // columns are orthonormal eigenvectors
};

/// Eigendecomposition of a Hermitian matrix. Throws numeric_error when the
/// input is not Hermitian within kTolLin (relative to its norm).
EigH eig_herm(const CMat& a);

/// Principal square root of a Hermitian positive definite matrix.
CMat sqrt_pd(const CMat& a);

/// Inverse of a Hermitian positive definite matrix; rejects condition
/// numbers above kCondCap.
CMat inverse_pd(const CMat& a);

/// exp(a) for Hermitian a.
CMat exp_herm(const CMat& a);

/// Largest singular value of an arbitrary complex matrix.
double spectral_norm(const CMat& a);

/// Smallest eigenvalue of a Hermitian matrix.
double min_eig_herm(const CMat& a);

/// True iff the Hermitian matrix has smallest eigenvalue >= -tol.
bool psd_check(const CMat& a, double tol = kTolPsd);

/// Condition number (eigenvalue ratio) of a Hermitian PD matrix.
double cond_pd(const CMat& a);

}  // namespace mwlab
