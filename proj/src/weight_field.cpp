#include "mwlab/weight_field.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <sstream>

#include "mwlab/rng.hpp"

namespace mwlab {

namespace {

constexpr double kPi = 3.14159265358979323846;

void store(std::vector<cplx>& dst, std::int64_t p, int d, const CMat& a) {
    for (int c = 0; c < d; ++c)
        for (int r = 0; r < d; ++r) dst[p * d * d + c * d + r] = a(r, c);
}

}  // namespace

WeightField WeightField::identity(const GridSpec& grid, int d) {
    std::vector<cplx> samples(static_cast<std::size_t>(grid.points()) * d * d, cplx(0.0));
    for (std::int64_t p = 0; p < grid.points(); ++p)
        for (int c = 0; c < d; ++c) samples[p * d * d + c * d + c] = cplx(1.0);
    return from_samples(grid, d, std::move(samples), Exec::serial);
}

WeightField WeightField::from_samples(const GridSpec& grid, int d, std::vector<cplx> samples,
                                      Exec exec) {
    grid.validate();
    if (d < 1 || d > kMaxDim) throw config_error("WeightField: d must be in [1,8]");
    const std::int64_t np = grid.points();
    if (samples.size() != static_cast<std::size_t>(np) * d * d)
        throw config_error("WeightField: sample count does not match grid");

    WeightField w;
    w.grid = grid;
    w.d = d;
    w.values = std::move(samples);
    w.inverse_values.assign(w.values.size(), cplx(0.0));

    std::mutex failure_mutex;
    std::string failure;
    for_each_index(exec, np, [&](std::int64_t p) {
        try {
            CMat a = hermitize(w.value(p));
            store(w.values, p, d, a);
            store(w.inverse_values, p, d, inverse_pd(a));
        } catch (const error& e) {
            std::scoped_lock lock(failure_mutex);
            if (failure.empty()) {
                std::ostringstream os;
                os << "WeightField: non-PD sample at point " << p << ": " << e.what();
                failure = os.str();
            }
        }
    });
    if (!failure.empty()) throw numeric_error(failure);
    return w;
}

double WeightField::max_condition() const {
    double worst = 1.0;
    for (std::int64_t p = 0; p < grid.points(); ++p)
        worst = std::max(worst, cond_pd(value(p)));
    return worst;
}

WeightFamily weight_family_from_string(const std::string& name) {
    if (name == "identity") return WeightFamily::identity;
    if (name == "scalar_oscillation") return WeightFamily::scalar_oscillation;
    if (name == "diagonal_exp") return WeightFamily::diagonal_exp;
    if (name == "rotated_diagonal") return WeightFamily::rotated_diagonal;
    if (name == "random_smooth") return WeightFamily::random_smooth;
    throw config_error("unknown weight family: " + name);
}

std::string to_string(WeightFamily family) {
    switch (family) {
        case WeightFamily::identity: return "identity";
        case WeightFamily::scalar_oscillation: return "scalar_oscillation";
        case WeightFamily::diagonal_exp: return "diagonal_exp";
        case WeightFamily::rotated_diagonal: return "rotated_diagonal";
        case WeightFamily::random_smooth: return "random_smooth";
    }
    throw config_error("invalid weight family");
}

namespace {

double require_param(const std::vector<double>& params, std::size_t i, const char* what) {
    if (params.size() <= i) {
        std::ostringstream os;
        os << "make_family: missing parameter " << i << " (" << what << ")";
        throw config_error(os.str());
    }
    return params[i];
}

/// Random Hermitian trigonometric polynomial: one matrix coefficient per
/// lattice point k with 0 < |k|_inf <= cutoff (half-space, mirrored by
/// conjugation), entries iid complex normal scaled to make |H| ~ eps.
struct TrigPolynomial {
    struct Term {
        double kx, ky;  // frequency (2 pi k / L)
        CMat coeff;
    };
    std::vector<Term> terms;

    static TrigPolynomial random(const GridSpec& grid, int d, double eps, int cutoff,
                                 std::uint64_t seed) {
        TrigPolynomial poly;
        Rng rng(seed);
        std::vector<std::array<int, 2>> lattice;
        if (grid.m == 1) {
            for (int k = 1; k <= cutoff; ++k) lattice.push_back({k, 0});
        } else {
            for (int kx = -cutoff; kx <= cutoff; ++kx)
                for (int ky = -cutoff; ky <= cutoff; ++ky) {
                    if (kx == 0 && ky == 0) continue;
                    if (kx < 0 || (kx == 0 && ky < 0)) continue;  // half-space
                    lattice.push_back({kx, ky});
                }
        }
        const double scale =
            eps / std::sqrt(2.0 * static_cast<double>(lattice.size()) * d);
        for (const auto& k : lattice) {
            Term t;
            t.kx = 2.0 * kPi * k[0] / grid.L;
            t.ky = 2.0 * kPi * k[1] / grid.L;
            t.coeff = CMat(d, d);
            for (int c = 0; c < d; ++c)
                for (int r = 0; r < d; ++r) t.coeff(r, c) = scale * rng.normal_complex();
            poly.terms.push_back(std::move(t));
        }
        return poly;
    }

    CMat eval(int d, double x, double y) const {
        CMat h = CMat::Zero(d, d);
        for (const Term& t : terms) {
            const double phase = t.kx * x + t.ky * y;
            const cplx e(std::cos(phase), std::sin(phase));
            h += e * t.coeff;
        }
        return hermitize(h + h.adjoint());  // C e^{i<k,x>} + C* e^{-i<k,x>}
    }
};

}  // namespace

WeightField make_family(WeightFamily family, const std::vector<double>& params,
                        const GridSpec& grid, int d, std::uint64_t seed, Exec exec) {
    grid.validate();
    if (d < 1 || d > kMaxDim) throw config_error("make_family: d must be in [1,8]");
    const std::int64_t np = grid.points();
    std::vector<cplx> samples(static_cast<std::size_t>(np) * d * d, cplx(0.0));

    switch (family) {
        case WeightFamily::identity: {
            return WeightField::identity(grid, d);
        }
        case WeightFamily::scalar_oscillation: {
            const double eps = require_param(params, 0, "eps");
            if (eps < 0.0 || eps >= 1.0)
                throw config_error("scalar_oscillation: eps must be in [0,1) to keep positivity");
            for_each_index(exec, np, [&](std::int64_t p) {
                const double x1 = grid.coords(p)[0];
                const double s = 1.0 + eps * std::sin(2.0 * kPi * x1 / grid.L);
                for (int c = 0; c < d; ++c) samples[p * d * d + c * d + c] = s;
            });
            break;
        }
        case WeightFamily::diagonal_exp: {
            const double eps = require_param(params, 0, "eps");
            for_each_index(exec, np, [&](std::int64_t p) {
                const double x1 = grid.coords(p)[0];
                const double s = std::sin(2.0 * kPi * x1 / grid.L);
                for (int c = 0; c < d; ++c) {
                    double v = 1.0;
                    if (c == 0) v = std::exp(eps * s);
                    if (c == 1) v = std::exp(-eps * s);
                    samples[p * d * d + c * d + c] = v;
                }
            });
            break;
        }
        case WeightFamily::rotated_diagonal: {
            const double eps = require_param(params, 0, "eps");
            const double theta = require_param(params, 1, "theta");
            if (d < 2) throw config_error("rotated_diagonal: requires d >= 2");
            CMat u = CMat::Identity(d, d);
            u(0, 0) = std::cos(theta);
            u(0, 1) = -std::sin(theta);
            u(1, 0) = std::sin(theta);
            u(1, 1) = std::cos(theta);
            for_each_index(exec, np, [&](std::int64_t p) {
                const double x1 = grid.coords(p)[0];
                const double s = std::sin(2.0 * kPi * x1 / grid.L);
                CMat diag = CMat::Identity(d, d);
                diag(0, 0) = std::exp(eps * s);
                diag(1, 1) = std::exp(-eps * s);
                CMat a = u * diag * u.adjoint();
                store(samples, p, d, a);
            });
            break;
        }
        case WeightFamily::random_smooth: {
            const double eps = require_param(params, 0, "eps");
            const int cutoff = static_cast<int>(require_param(params, 1, "cutoff"));
            if (cutoff < 1 || cutoff > grid.n / 4)
                throw config_error("random_smooth: cutoff must be in [1, n/4]");
            const TrigPolynomial poly = TrigPolynomial::random(grid, d, eps, cutoff, seed);
            for_each_index(exec, np, [&](std::int64_t p) {
                const auto xy = grid.coords(p);
                CMat a = exp_herm(poly.eval(d, xy[0], xy[1]));
                store(samples, p, d, a);
            });
            break;
        }
    }
    return WeightField::from_samples(grid, d, std::move(samples), exec);
}

VectorField bump_vector_field(const std::vector<double>& center, double width,
                              const CVec& direction, const GridSpec& grid) {
    grid.validate();
    if (center.size() != static_cast<std::size_t>(grid.m))
        throw config_error("bump_vector_field: center dimension mismatch");
    const double h = grid.spacing();
    if (width < 3.0 * h || width > grid.L / 8.0)
        throw config_error("bump_vector_field: width outside the resolvable band [3h, L/8]");
    const int d = static_cast<int>(direction.size());
    VectorField f = VectorField::zeros(grid, d);
    const double inv2w2 = 1.0 / (2.0 * width * width);
    const int images = 4;
    for (std::int64_t p = 0; p < grid.points(); ++p) {
        const auto xy = grid.coords(p);
        double amp = 0.0;
        if (grid.m == 1) {
            const double dx = xy[0] - center[0];
            for (int nu = -images; nu <= images; ++nu) {
                const double u = dx + nu * grid.L;
                amp += std::exp(-u * u * inv2w2);
            }
        } else {
            const double dx = xy[0] - center[0];
            const double dy = xy[1] - center[1];
            for (int nux = -images; nux <= images; ++nux)
                for (int nuy = -images; nuy <= images; ++nuy) {
                    const double ux = dx + nux * grid.L;
                    const double uy = dy + nuy * grid.L;
                    amp += std::exp(-(ux * ux + uy * uy) * inv2w2);
                }
        }
        for (int c = 0; c < d; ++c) f.values[p * d + c] = amp * direction(c);
    }
    return f;
}

double weighted_norm2(const VectorField& f, const WeightField& w) {
    if (!(f.grid == w.grid) || f.d != w.d) throw config_error("weighted_norm2: grid mismatch");
    double s = 0.0;
    for (std::int64_t p = 0; p < f.grid.points(); ++p) {
        const CVec v = f.at(p);
        s += std::real(v.dot(w.value(p) * v));
    }
    return std::sqrt(std::max(0.0, f.grid.cell() * s));
}

double inverse_weighted_norm2(const VectorField& g, const WeightField& w) {
    if (!(g.grid == w.grid) || g.d != w.d)
        throw config_error("inverse_weighted_norm2: grid mismatch");
    double s = 0.0;
    for (std::int64_t p = 0; p < g.grid.points(); ++p) {
        const CVec v = g.at(p);
        s += std::real(v.dot(w.inverse(p) * v));
    }
    return std::sqrt(std::max(0.0, g.grid.cell() * s));
}

std::vector<CMat> dyadic_leaves_from_field(const WeightField& w) {
    if (w.grid.m != 1) throw config_error("dyadic_leaves_from_field: requires m = 1");
    std::vector<CMat> leaves;
    leaves.reserve(w.grid.n);
    for (std::int64_t p = 0; p < w.grid.points(); ++p) leaves.push_back(w.value(p));
    return leaves;
}

std::vector<CMat> coarsen_leaves(std::vector<CMat> leaves, std::size_t target) {
    if (target == 0 || (target & (target - 1)) != 0)
        throw config_error("coarsen_leaves: target must be a power of two");
    while (leaves.size() > target) {
        std::vector<CMat> next(leaves.size() / 2);
        for (std::size_t i = 0; i < next.size(); ++i)
            next[i] = 0.5 * (leaves[2 * i] + leaves[2 * i + 1]);
        leaves = std::move(next);
    }
    if (leaves.size() != target)
        throw config_error("coarsen_leaves: leaf count smaller than target");
    return leaves;
}

}  // namespace mwlab
