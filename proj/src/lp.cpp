#include "mwlab/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mwlab/bellman.hpp"
#include "mwlab/riesz.hpp"

namespace mwlab {

namespace {

void require_mean_zero(const VectorField& f, const char* who) {
    const double scale = f.norm2();
    if (scale == 0.0) return;
    if (f.mean().norm() > 1e-12 * scale / std::sqrt(f.grid.cell() * f.grid.points()))
        throw config_error(std::string(who) + ": input field must be mean-zero");
}

/// sum_p h^m sum_i |(d_i f^h, d_i g^h)(p, t)| at one time node, and the
/// Cauchy-Schwarz majorant sum_i ||d_i f^h|| ||d_i g^h|| used for the tail.
struct GradientPairing {
    const SpectralField& f_hat;
    const SpectralField& g_hat;

    double integrand(double t) const {
        const GridSpec& grid = f_hat.grid;
        const int d = f_hat.comps;
        const std::int64_t np = grid.points();
        double total = 0.0;
        std::vector<cplx> df, dg;
        for (int axis = 0; axis < grid.m; ++axis) {
            f_hat.gradient_heat_slice_into(axis, t, df, Exec::serial);
            g_hat.gradient_heat_slice_into(axis, t, dg, Exec::serial);
            for (std::int64_t p = 0; p < np; ++p) {
                cplx pairing(0.0, 0.0);
                for (int c = 0; c < d; ++c)
                    pairing += df[p * d + c] * std::conj(dg[p * d + c]);
                total += std::abs(pairing);
            }
        }
        return grid.cell() * total;
    }

    double majorant(double t) const {
        const GridSpec& grid = f_hat.grid;
        const int d = f_hat.comps;
        const std::int64_t np = grid.points();
        double total = 0.0;
        std::vector<cplx> df, dg;
        for (int axis = 0; axis < grid.m; ++axis) {
            f_hat.gradient_heat_slice_into(axis, t, df, Exec::serial);
            g_hat.gradient_heat_slice_into(axis, t, dg, Exec::serial);
            double nf = 0.0, ng = 0.0;
            for (std::int64_t p = 0; p < np; ++p)
                for (int c = 0; c < d; ++c) {
                    nf += std::norm(df[p * d + c]);
                    ng += std::norm(dg[p * d + c]);
                }
            total += grid.cell() * std::sqrt(nf * ng);
        }
        return total;
    }
};

}  // namespace

double lp_lhs(const VectorField& f, const VectorField& g, const TimeGrid& tgrid, Exec exec,
              double* tail_bound) {
    if (!(f.grid == g.grid) || f.d != g.d) throw config_error("lp_lhs: grid mismatch");
    require_mean_zero(f, "lp_lhs");
    require_mean_zero(g, "lp_lhs");

    const SpectralField f_hat = SpectralField::analyze(f.grid, f.d, f.values, exec);
    const SpectralField g_hat = SpectralField::analyze(g.grid, g.d, g.values, exec);
    const GradientPairing pairing{f_hat, g_hat};

    const int nt = tgrid.count();
    std::vector<double> node_values(nt, 0.0);
    for_each_index(exec, nt, [&](std::int64_t i) {
        node_values[i] = pairing.integrand(tgrid.nodes[i]);
    });

    double integral = 0.0;
    for (int i = 0; i < nt; ++i) integral += tgrid.weights[i] * node_values[i];
    // Head cell [0, t_min]: the integrand is smooth at t = 0, one trapezoid
    // step is below quadrature tolerance for t_min = h^2/4.
    integral += 0.5 * tgrid.t_min * (pairing.integrand(0.0) + node_values[0]);

    // Tail above t_max: every mode of a mean-zero field decays at least like
    // exp(-t xi_min^2), so the integrand is bounded by its value at t_max
    // times exp(-2 (t - t_max) xi_min^2).
    const double xi_min2 = f.grid.xi_min() * f.grid.xi_min();
    const double tail = pairing.majorant(tgrid.t_max) / (2.0 * xi_min2);
    if (tail_bound != nullptr) *tail_bound = 2.0 * tail;

    return 2.0 * integral;
}

LPReport lp_report(const VectorField& f, const VectorField& g, const WeightField& w,
                   const TimeGrid& tgrid, Exec exec) {
    LPReport report;
    report.lhs = lp_lhs(f, g, tgrid, exec, &report.tail_bound);
    report.rhs_f = weighted_norm2(f, w);
    report.rhs_g = inverse_weighted_norm2(g, w);
    const double denom = report.rhs_f * report.rhs_g;
    report.ratio = denom > 0.0 ? report.lhs / denom : 0.0;
    if (report.lhs > 0.0 && report.tail_bound > 0.01 * report.lhs) {
        std::ostringstream os;
        os << "lp_report: tail bound " << report.tail_bound << " exceeds 1% of the integral "
           << report.lhs << " (t_max too small)";
        throw numeric_error(os.str());
    }
    return report;
}

DualityReport duality_check(const VectorField& phi, const VectorField& psi, int axis,
                            const TimeGrid& tgrid, Exec exec) {
    if (!(phi.grid == psi.grid) || phi.d != psi.d)
        throw config_error("duality_check: grid mismatch");
    if (axis < 1 || axis > phi.grid.m) throw config_error("duality_check: axis out of range");
    require_mean_zero(phi, "duality_check");
    require_mean_zero(psi, "duality_check");

    DualityReport report;

    // Side 1: Fourier multiplier route.
    SignPattern pattern;
    pattern.axes = {axis};
    pattern.signs = {1};
    const MultiplierOp op = MultiplierOp::riesz_square_sum(phi.grid, pattern);
    report.quadratic_form = std::real(riesz_square_quadratic_form(op, phi, psi, exec));

    // Side 2: signed time quadrature of the heat-gradient pairing.
    const SpectralField phi_hat = SpectralField::analyze(phi.grid, phi.d, phi.values, exec);
    const SpectralField psi_hat = SpectralField::analyze(psi.grid, psi.d, psi.values, exec);
    const int nt = tgrid.count();
    const int d = phi.d;
    const std::int64_t np = phi.grid.points();
    std::vector<double> node_values(nt + 1, 0.0);
    for_each_index(exec, nt + 1, [&](std::int64_t i) {
        const double t = i == 0 ? 0.0 : tgrid.nodes[i - 1];
        std::vector<cplx> dphi, dpsi;
        phi_hat.gradient_heat_slice_into(axis - 1, t, dphi, Exec::serial);
        psi_hat.gradient_heat_slice_into(axis - 1, t, dpsi, Exec::serial);
        double s = 0.0;
        for (std::int64_t p = 0; p < np; ++p)
            for (int c = 0; c < d; ++c)
                s += std::real(dphi[p * d + c] * std::conj(dpsi[p * d + c]));
        node_values[i] = phi.grid.cell() * s;
    });
    double integral = 0.5 * tgrid.t_min * (node_values[0] + node_values[1]);
    for (int i = 0; i < nt; ++i) integral += tgrid.weights[i] * node_values[i + 1];
    report.gradient_pairing = -2.0 * integral;

    const double floor = 1e-12 * std::max(1.0, phi.norm2() * psi.norm2());
    report.residual = std::abs(report.quadratic_form - report.gradient_pairing) /
                      std::max({std::abs(report.quadratic_form),
                                std::abs(report.gradient_pairing), floor});
    return report;
}

TrajectoryReport bellman_trajectory(const WeightField& w, const VectorField& f,
                                    const VectorField& g,
                                    const std::vector<std::array<double, 3>>& samples,
                                    const TimeGrid& tgrid, Exec exec) {
    if (!(w.grid == f.grid) || !(f.grid == g.grid) || w.d != f.d || f.d != g.d)
        throw config_error("bellman_trajectory: grid mismatch");

    const WeightHeat heat(w, exec);
    const SpectralField f_hat = SpectralField::analyze(f.grid, f.d, f.values, exec);
    const SpectralField g_hat = SpectralField::analyze(g.grid, g.d, g.values, exec);

    // Scalar pairings (W f, f) and (W^{-1} g, g) on the grid.
    VectorField wf = VectorField::zeros(f.grid, 1);
    VectorField wg = VectorField::zeros(g.grid, 1);
    for (std::int64_t p = 0; p < f.grid.points(); ++p) {
        const CVec fv = f.at(p);
        const CVec gv = g.at(p);
        wf.values[p] = std::real(fv.dot(w.value(p) * fv));
        wg.values[p] = std::real(gv.dot(w.inverse(p) * gv));
    }
    const SpectralField wf_hat = SpectralField::analyze(f.grid, 1, wf.values, exec);
    const SpectralField wg_hat = SpectralField::analyze(g.grid, 1, wg.values, exec);

    // The characteristic is a supremum, so every evaluated point is a lower
    // bound; fold the sampled values in so delta dominates each sample.
    double charval = heat_a2_characteristic(w, tgrid, 2, exec);
    const int n_samples = static_cast<int>(samples.size());
    std::vector<double> sample_norms(n_samples, 0.0);
    for_each_index(exec, n_samples, [&](std::int64_t i) {
        const std::array<double, 2> x{samples[i][0], samples[i][1]};
        sample_norms[i] = heat.product_norm_at(x, samples[i][2]);
    });
    for (double v : sample_norms) charval = std::max(charval, v);

    TrajectoryReport report;
    report.delta = charval - 1.0;
    report.min_margin = std::numeric_limits<double>::infinity();
    report.samples.resize(n_samples);

    std::vector<TrajectorySample> rows(n_samples);
    for_each_index(exec, n_samples, [&](std::int64_t i) {
        const std::array<double, 2> x{samples[i][0], samples[i][1]};
        const double t = samples[i][2];
        BellmanPoint point;
        point.X = std::max(0.0, std::real(wf_hat.eval_heat_at(x, t)[0]));
        point.Y = std::max(0.0, std::real(wg_hat.eval_heat_at(x, t)[0]));
        const auto fv = f_hat.eval_heat_at(x, t);
        const auto gv = g_hat.eval_heat_at(x, t);
        point.x = CVec(f.d);
        point.y = CVec(g.d);
        for (int c = 0; c < f.d; ++c) {
            point.x(c) = fv[c];
            point.y(c) = gv[c];
        }
        point.r = heat.value_at(x, t);
        point.s = heat.inverse_at(x, t);
        const DomainMargins margins = in_domain(point, report.delta);
        TrajectorySample row;
        row.x = x;
        row.t = t;
        row.margin_x = margins.margin_x;
        row.margin_y = margins.margin_y;
        row.margin_lower = margins.margin_lower;
        row.margin_upper = margins.margin_upper;
        row.inside = margins.inside();
        rows[i] = row;
    });

    for (int i = 0; i < n_samples; ++i) {
        report.samples[i] = rows[i];
        if (!rows[i].inside) ++report.violations;
        report.min_margin = std::min({report.min_margin, rows[i].margin_x, rows[i].margin_y,
                                      rows[i].margin_lower, rows[i].margin_upper});
    }
    if (n_samples == 0) report.min_margin = 0.0;
    return report;
}

}  // namespace mwlab
