#include "mwlab/riesz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mwlab/fft.hpp"
#include "mwlab/rng.hpp"

namespace mwlab {

void SignPattern::validate(int m) const {
    if (axes.empty() || axes.size() != signs.size())
        throw config_error("SignPattern: axes and signs must be nonempty and equal length");
    std::vector<bool> seen(static_cast<std::size_t>(m) + 1, false);
    for (std::size_t i = 0; i < axes.size(); ++i) {
        if (axes[i] < 1 || axes[i] > m) throw config_error("SignPattern: axis out of range");
        if (seen[axes[i]]) throw config_error("SignPattern: duplicate axis");
        seen[axes[i]] = true;
        if (signs[i] != 1 && signs[i] != -1) throw config_error("SignPattern: signs must be +-1");
    }
}

std::vector<SignPattern> SignPattern::all_nonempty(int m) {
    std::vector<SignPattern> out;
    const int subsets = 1 << m;
    for (int mask = 1; mask < subsets; ++mask) {
        std::vector<int> axes;
        for (int a = 0; a < m; ++a)
            if (mask & (1 << a)) axes.push_back(a + 1);
        const int k = static_cast<int>(axes.size());
        for (int smask = 0; smask < (1 << k); ++smask) {
            SignPattern p;
            p.axes = axes;
            p.signs.resize(k);
            for (int i = 0; i < k; ++i) p.signs[i] = (smask & (1 << i)) ? -1 : 1;
            out.push_back(std::move(p));
        }
    }
    return out;
}

MultiplierOp MultiplierOp::riesz(const GridSpec& grid, int axis) {
    grid.validate();
    if (axis < 1 || axis > grid.m) throw config_error("riesz: axis out of range");
    MultiplierOp op;
    op.grid = grid;
    op.symbol.assign(static_cast<std::size_t>(grid.points()), cplx(0.0));
    for (std::int64_t p = 1; p < grid.points(); ++p) {
        const auto ij = grid.axis_index(p);
        const int k = axis == 1 ? ij[0] : ij[1];
        if (grid.signed_index(k) == -grid.n / 2) continue;  // unpaired Nyquist row
        const double xi = grid.xi(k);
        const double norm = std::sqrt(grid.xi_norm2(p));
        if (norm > 0.0) op.symbol[p] = cplx(0.0, -xi / norm);
    }
    return op;
}

MultiplierOp MultiplierOp::riesz_square_sum(const GridSpec& grid, const SignPattern& pattern) {
    grid.validate();
    pattern.validate(grid.m);
    MultiplierOp op;
    op.grid = grid;
    op.symbol.assign(static_cast<std::size_t>(grid.points()), cplx(0.0));
    for (std::int64_t p = 1; p < grid.points(); ++p) {
        const auto ij = grid.axis_index(p);
        const double n2 = grid.xi_norm2(p);
        double s = 0.0;
        for (std::size_t i = 0; i < pattern.axes.size(); ++i) {
            const int k = pattern.axes[i] == 1 ? ij[0] : ij[1];
            const double xi = grid.xi(k);
            s += pattern.signs[i] * xi * xi;
        }
        op.symbol[p] = cplx(-s / n2, 0.0);
    }
    return op;
}

MultiplierOp MultiplierOp::adjoint() const {
    MultiplierOp a = *this;
    for (cplx& s : a.symbol) s = std::conj(s);
    return a;
}

double MultiplierOp::unweighted_norm() const {
    double best = 0.0;
    for (const cplx& s : symbol) best = std::max(best, std::abs(s));
    return best;
}

VectorField apply_multiplier(const MultiplierOp& op, const VectorField& f, Exec exec) {
    if (!(op.grid == f.grid)) throw config_error("apply_multiplier: grid mismatch");
    const std::int64_t np = f.grid.points();
    VectorField out = f;
    for_each_index(exec, f.d, [&](std::int64_t c) {
        std::vector<cplx> block(static_cast<std::size_t>(np));
        for (std::int64_t p = 0; p < np; ++p) block[p] = f.values[p * f.d + c];
        fft_inplace(f.grid, block.data(), false);
        for (std::int64_t p = 0; p < np; ++p) block[p] *= op.symbol[p];
        fft_inplace(f.grid, block.data(), true);
        for (std::int64_t p = 0; p < np; ++p) out.values[p * f.d + c] = block[p];
    });
    return out;
}

namespace {

/// One application of S = M_{W^{1/2}} T M_{W^{-1/2}} in the similarity
/// picture; sqrt fields are precomputed.
struct SimilarOperator {
    const MultiplierOp& op;
    const MultiplierOp adj;
    const GridSpec grid;
    int d;
    std::vector<cplx> w_sqrt, w_inv_sqrt;  // per point, column-major d x d blocks

    SimilarOperator(const MultiplierOp& op_, const WeightField& w)
        : op(op_), adj(op_.adjoint()), grid(w.grid), d(w.d) {
        const std::int64_t np = grid.points();
        w_sqrt.resize(static_cast<std::size_t>(np) * d * d);
        w_inv_sqrt.resize(w_sqrt.size());
        for (std::int64_t p = 0; p < np; ++p) {
            const CMat s = sqrt_pd(w.value(p));
            const CMat si = sqrt_pd(w.inverse(p));
            for (int c = 0; c < d; ++c)
                for (int r = 0; r < d; ++r) {
                    w_sqrt[p * d * d + c * d + r] = s(r, c);
                    w_inv_sqrt[p * d * d + c * d + r] = si(r, c);
                }
        }
    }

    void pointwise(const std::vector<cplx>& blocks, VectorField& f) const {
        const std::int64_t np = grid.points();
        for (std::int64_t p = 0; p < np; ++p) {
            CVec v(d);
            for (int c = 0; c < d; ++c) v(c) = f.values[p * d + c];
            CVec out = CVec::Zero(d);
            for (int c = 0; c < d; ++c)
                for (int r = 0; r < d; ++r) out(r) += blocks[p * d * d + c * d + r] * v(c);
            for (int c = 0; c < d; ++c) f.values[p * d + c] = out(c);
        }
    }

    VectorField apply(const VectorField& v, Exec exec) const {
        VectorField f = v;
        pointwise(w_inv_sqrt, f);
        f = apply_multiplier(op, f, exec);
        pointwise(w_sqrt, f);
        return f;
    }

    VectorField apply_adjoint(const VectorField& v, Exec exec) const {
        VectorField f = v;
        pointwise(w_sqrt, f);
        f = apply_multiplier(adj, f, exec);
        pointwise(w_inv_sqrt, f);
        return f;
    }
};

}  // namespace

double weighted_norm(const MultiplierOp& op, const WeightField& w,
                     const PowerIterOptions& options, PowerIterResult* details, Exec exec) {
    if (!(op.grid == w.grid)) throw config_error("weighted_norm: grid mismatch");
    const SimilarOperator sim(op, w);
    const std::int64_t np = w.grid.points();
    const int d = w.d;

    // Max over seeded restarts; every Rayleigh quotient is a valid lower
    // bound on ||S||^2, and at least one restart has to converge.
    PowerIterResult best;
    bool any_converged = false;
    double worst_gap = std::numeric_limits<double>::infinity();
    for (int restart = 0; restart < options.restarts; ++restart) {
        Rng rng = Rng::task_stream(options.seed, static_cast<std::uint64_t>(restart));
        VectorField v = VectorField::zeros(w.grid, d);
        for (std::int64_t i = 0; i < np * d; ++i) v.values[i] = rng.normal_complex();
        v.remove_mean();
        const double scale = v.norm2();
        if (scale == 0.0) continue;
        v *= cplx(1.0 / scale, 0.0);

        double rayleigh = 0.0;
        double prev = -1.0;
        double gap = std::numeric_limits<double>::infinity();
        int used = 0;
        bool converged = false;
        for (int it = 0; it < options.iters; ++it) {
            VectorField sv = sim.apply(v, exec);
            const double snorm = sv.norm2();
            rayleigh = snorm * snorm;  // ||S v||^2 with ||v|| = 1
            gap = std::abs(rayleigh - prev);
            used = it + 1;
            if (prev >= 0.0 && gap < options.tol * std::max(1.0, rayleigh)) {
                converged = true;
                break;
            }
            prev = rayleigh;
            VectorField u = sim.apply_adjoint(sv, exec);
            u.remove_mean();
            const double unorm = u.norm2();
            if (unorm == 0.0) break;  // S annihilates the iterate
            u *= cplx(1.0 / unorm, 0.0);
            v = std::move(u);
        }
        any_converged = any_converged || converged;
        worst_gap = std::min(worst_gap, gap);
        if (rayleigh >= best.norm * best.norm) {
            best.norm = std::sqrt(std::max(0.0, rayleigh));
            best.iterations = used;
            best.last_gap = gap;
            best.converged = converged;
        }
    }
    best.converged = any_converged;

    if (details != nullptr) *details = best;
    if (!any_converged) {
        std::ostringstream os;
        os << "weighted_norm: power iteration did not converge in " << options.iters
           << " iterations (smallest Rayleigh gap " << worst_gap << ")";
        throw numeric_error(os.str());
    }
    return best.norm;
}

cplx riesz_square_quadratic_form(const MultiplierOp& op, const VectorField& phi,
                                 const VectorField& psi, Exec exec) {
    if (!(phi.grid == psi.grid) || phi.d != psi.d)
        throw config_error("riesz_square_quadratic_form: grid mismatch");
    return dot(apply_multiplier(op, phi, exec), psi);
}

}  // namespace mwlab
