#include "mwlab/heat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mwlab {

TimeGrid TimeGrid::log_spaced(double t_min, double t_max, int count) {
    if (!(t_min > 0.0) || !(t_max >= t_min)) throw config_error("TimeGrid: need 0 < t_min <= t_max");
    if (count < 2) throw config_error("TimeGrid: need at least 2 nodes");
    TimeGrid g;
    g.t_min = t_min;
    g.t_max = t_max;
    g.nodes.resize(count);
    const double ratio = std::log(t_max / t_min) / (count - 1);
    for (int i = 0; i < count; ++i) g.nodes[i] = t_min * std::exp(ratio * i);
    g.nodes.front() = t_min;
    g.nodes.back() = t_max;
    g.weights.assign(count, 0.0);
    for (int i = 0; i + 1 < count; ++i) {
        const double half = 0.5 * (g.nodes[i + 1] - g.nodes[i]);
        g.weights[i] += half;
        g.weights[i + 1] += half;
    }
    return g;
}

TimeGrid TimeGrid::for_grid(const GridSpec& grid, int count) {
    const double h = grid.spacing();
    return log_spaced(h * h / 4.0, grid.L * grid.L, count);
}

VectorField heat_slice(const VectorField& input, double t, Exec exec) {
    if (!(t > 0.0)) throw config_error("heat_slice: t must be positive");
    SpectralField hat = SpectralField::analyze(input.grid, input.d, input.values, exec);
    VectorField out = input;
    hat.heat_slice_into(t, out.values, exec);
    return out;
}

WeightField heat_slice(const WeightField& input, double t, Exec exec) {
    if (!(t > 0.0)) throw config_error("heat_slice: t must be positive");
    SpectralField hat =
        SpectralField::analyze(input.grid, input.d * input.d, input.values, exec);
    std::vector<cplx> values;
    hat.heat_slice_into(t, values, exec);
    try {
        return WeightField::from_samples(input.grid, input.d, std::move(values), exec);
    } catch (const numeric_error& e) {
        throw numeric_error(std::string("heat_slice: slice failed HermPD validation "
                                        "(grid too coarse for the weight): ") +
                            e.what());
    }
}

VectorField heat_pairing_field(const WeightField& w, const VectorField& f, double t,
                               Exec exec) {
    if (!(w.grid == f.grid) || w.d != f.d) throw config_error("heat_pairing_field: grid mismatch");
    VectorField pairing = VectorField::zeros(f.grid, 1);
    for (std::int64_t p = 0; p < f.grid.points(); ++p) {
        const CVec v = f.at(p);
        pairing.values[p] = std::real(v.dot(w.value(p) * v));
    }
    return heat_slice(pairing, t, exec);
}

WeightHeat::WeightHeat(const WeightField& w, Exec exec)
    : grid_(w.grid),
      d_(w.d),
      w_hat_(SpectralField::analyze(w.grid, w.d * w.d, w.values, exec)),
      winv_hat_(SpectralField::analyze(w.grid, w.d * w.d, w.inverse_values, exec)) {}

namespace {

CMat assemble(const std::vector<cplx>& comps, int d) {
    CMat a(d, d);
    for (int c = 0; c < d; ++c)
        for (int r = 0; r < d; ++r) a(r, c) = comps[c * d + r];
    return hermitize(a);
}

}  // namespace

CMat WeightHeat::value_at(const std::array<double, 2>& x, double t) const {
    return assemble(w_hat_.eval_heat_at(x, t), d_);
}

CMat WeightHeat::inverse_at(const std::array<double, 2>& x, double t) const {
    return assemble(winv_hat_.eval_heat_at(x, t), d_);
}

double WeightHeat::product_norm_at(const std::array<double, 2>& x, double t) const {
    return spectral_norm(sqrt_pd(value_at(x, t)) * sqrt_pd(inverse_at(x, t)));
}

double heat_a2_characteristic(const WeightField& w, const TimeGrid& tgrid, int refine,
                              Exec exec, A2Result* details) {
    const GridSpec& grid = w.grid;
    const double needed_span = grid.L * grid.L;
    if (tgrid.t_max < needed_span)
        throw config_error("heat_a2_characteristic: t_max must reach L^2");

    const WeightHeat heat(w, exec);
    const std::int64_t np = grid.points();
    const int nt = tgrid.count();

    // Scan: per time node, slice both fields and take the pointwise product
    // norm; per-node maxima land in slots, the final reduction is serial.
    std::vector<double> node_max(nt, 1.0);
    std::vector<std::int64_t> node_arg(nt, 0);
    std::vector<std::string> node_error(nt);
    for_each_index(exec, nt, [&](std::int64_t ti) {
        std::vector<cplx> wt, wit;
        heat.weight_spectrum().heat_slice_into(tgrid.nodes[ti], wt, Exec::serial);
        heat.inverse_spectrum().heat_slice_into(tgrid.nodes[ti], wit, Exec::serial);
        const int d = w.d;
        double best = 0.0;
        std::int64_t arg = 0;
        try {
            for (std::int64_t p = 0; p < np; ++p) {
                CMat a(d, d), b(d, d);
                for (int c = 0; c < d; ++c)
                    for (int r = 0; r < d; ++r) {
                        a(r, c) = wt[p * d * d + c * d + r];
                        b(r, c) = wit[p * d * d + c * d + r];
                    }
                const double v = spectral_norm(sqrt_pd(hermitize(a)) * sqrt_pd(hermitize(b)));
                if (v > best) {
                    best = v;
                    arg = p;
                }
            }
            node_max[ti] = best;
            node_arg[ti] = arg;
        } catch (const error& e) {
            node_error[ti] = std::string("heat_a2_characteristic: slice failed HermPD "
                                         "validation (aliasing, grid too coarse): ") +
                             e.what();
        }
    });
    for (const auto& msg : node_error)
        if (!msg.empty()) throw numeric_error(msg);

    double best = 1.0;
    int best_t = 0;
    std::int64_t best_p = 0;
    for (int ti = 0; ti < nt; ++ti) {
        if (node_max[ti] > best) {
            best = node_max[ti];
            best_t = ti;
            best_p = node_arg[ti];
        }
    }

    std::array<double, 2> x = grid.coords(best_p);
    double t = tgrid.nodes[best_t];

    // Local refinement: pattern search on a shrinking (x,t) box around the
    // argmax; t may move above t_max (the objective flattens out there).
    A2Result result;
    double dx = grid.spacing();
    double dt_factor = std::sqrt(tgrid.count() > 1 ? tgrid.nodes[1] / tgrid.nodes[0] : 2.0);
    for (int round = 0; round < refine; ++round) {
        for (int step = 0; step < 4; ++step) {
            double local_best = best;
            std::array<double, 2> local_x = x;
            double local_t = t;
            const int span = 2;
            for (int ix = -span; ix <= span; ++ix) {
                for (int iy = -span; iy <= span; ++iy) {
                    if (grid.m == 1 && iy != 0) continue;
                    for (int it = -span; it <= span; ++it) {
                        std::array<double, 2> cx{x[0] + ix * dx, x[1] + iy * dx};
                        double ct = t * std::pow(dt_factor, it);
                        ct = std::max(ct, tgrid.t_min * 1e-3);
                        const double v = heat.product_norm_at(cx, ct);
                        if (v > local_best) {
                            local_best = v;
                            local_x = cx;
                            local_t = ct;
                        }
                    }
                }
            }
            best = local_best;
            x = local_x;
            t = local_t;
        }
        dx *= 0.25;
        dt_factor = std::pow(dt_factor, 0.25);
        result.refine_values.push_back(best);
    }

    best = std::max(best, 1.0 - kTolPsd);
    if (details != nullptr) {
        result.value = best;
        result.arg_x = x;
        result.arg_t = t;
        details->value = result.value;
        details->arg_x = result.arg_x;
        details->arg_t = result.arg_t;
        details->refine_values = result.refine_values;
    }
    return best;
}

}  // namespace mwlab
