#include "mwlab/matlin.hpp"

#include <cmath>
#include <sstream>

namespace mwlab {

namespace {

double norm_or_one(const CMat& a) {
    const double n = a.norm();
    return n > 0.0 ? n : 1.0;
}

}  // namespace

CMat hermitize(const CMat& a) {
    return 0.5 * (a + a.adjoint()).eval();
}

EigH eig_herm(const CMat& a) {
    if (a.rows() != a.cols() || a.rows() < 1 || a.rows() > kMaxDim)
        throw config_error("eig_herm: matrix must be square with dim in [1,8]");
    if (!a.allFinite()) throw numeric_error("eig_herm: non-finite entries");
    const double asym = (a - a.adjoint()).norm();
    if (asym > kTolLin * norm_or_one(a)) {
        std::ostringstream os;
        os << "eig_herm: input not Hermitian, relative asymmetry " << asym / norm_or_one(a);
        throw numeric_error(os.str());
    }
    Eigen::SelfAdjointEigenSolver<CMat> solver(hermitize(a));
    if (solver.info() != Eigen::Success)
        throw numeric_error("eig_herm: eigendecomposition failed");
    return EigH{solver.eigenvalues(), solver.eigenvectors()};
}

CMat sqrt_pd(const CMat& a) {
    const EigH e = eig_herm(a);
    const double scale = std::abs(e.values(e.values.size() - 1));
    if (e.values(0) <= 0.0 || e.values(0) <= -kTolPsd * scale)
        throw numeric_error("sqrt_pd: matrix is not positive definite");
    RVec roots = e.values.cwiseMax(0.0).cwiseSqrt();
    CMat r = e.vectors * roots.asDiagonal() * e.vectors.adjoint();
    return hermitize(r);
}

CMat inverse_pd(const CMat& a) {
    const EigH e = eig_herm(a);
    if (e.values(0) <= 0.0)
        throw numeric_error("inverse_pd: matrix is not positive definite");
    const double cond = e.values(e.values.size() - 1) / e.values(0);
    if (cond > kCondCap) {
        std::ostringstream os;
        os << "inverse_pd: condition number " << cond << " exceeds cap " << kCondCap
           << " (degenerate weight sample)";
        throw numeric_error(os.str());
    }
    RVec inv = e.values.cwiseInverse();
    CMat r = e.vectors * inv.asDiagonal() * e.vectors.adjoint();
    return hermitize(r);
}

CMat exp_herm(const CMat& a) {
    const EigH e = eig_herm(a);
    RVec ex = e.values.array().exp().matrix();
    CMat r = e.vectors * ex.asDiagonal() * e.vectors.adjoint();
    return hermitize(r);
}

double spectral_norm(const CMat& a) {
    if (!a.allFinite()) throw numeric_error("spectral_norm: non-finite entries");
    if (a.rows() == 0 || a.cols() == 0) return 0.0;
    // Largest eigenvalue of the Hermitian Gram matrix; exact enough at d <= 8.
    CMat g = a.adjoint() * a;
    Eigen::SelfAdjointEigenSolver<CMat> solver(hermitize(g));
    if (solver.info() != Eigen::Success)
        throw numeric_error("spectral_norm: eigendecomposition failed");
    const double top = solver.eigenvalues()(solver.eigenvalues().size() - 1);
    return std::sqrt(std::max(top, 0.0));
}

double min_eig_herm(const CMat& a) {
    return eig_herm(a).values(0);
}

bool psd_check(const CMat& a, double tol) {
    return min_eig_herm(a) >= -tol;
}

double cond_pd(const CMat& a) {
    const EigH e = eig_herm(a);
    if (e.values(0) <= 0.0)
        throw numeric_error("cond_pd: matrix is not positive definite");
    return e.values(e.values.size() - 1) / e.values(0);
}

}  // namespace mwlab
