#include "mwlab/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mwlab/bellman.hpp"
#include "mwlab/heat.hpp"
#include "mwlab/lp.hpp"
#include "mwlab/riesz.hpp"
#include "mwlab/rng.hpp"
#include "mwlab/weight_io.hpp"

namespace mwlab {

Experiment experiment_from_string(const std::string& name) {
    if (name == "a2h") return Experiment::a2h;
    if (name == "riesz_norm") return Experiment::riesz_norm;
    if (name == "lp") return Experiment::lp;
    if (name == "duality") return Experiment::duality;
    if (name == "martingale") return Experiment::martingale;
    if (name == "bellman_sweep") return Experiment::bellman_sweep;
    if (name == "full_sweep") return Experiment::full_sweep;
    throw config_error("unknown experiment: " + name);
}

std::string to_string(Experiment e) {
    switch (e) {
        case Experiment::a2h: return "a2h";
        case Experiment::riesz_norm: return "riesz_norm";
        case Experiment::lp: return "lp";
        case Experiment::duality: return "duality";
        case Experiment::martingale: return "martingale";
        case Experiment::bellman_sweep: return "bellman_sweep";
        case Experiment::full_sweep: return "full_sweep";
    }
    throw config_error("invalid experiment");
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    c.experiment = experiment_from_string(j.at("experiment").get<std::string>());
    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        c.grid_m = g.value("m", c.grid_m);
        c.grid_n = g.value("n", c.grid_n);
        c.grid_L = g.value("L", c.grid_L);
    }
    c.d = j.value("d", c.d);
    if (j.contains("weight")) {
        const auto& w = j.at("weight");
        c.weight.family = w.value("family", c.weight.family);
        if (w.contains("params")) c.weight.params = w.at("params").get<std::vector<double>>();
        c.weight.file = w.value("file", c.weight.file);
    }
    c.time_nodes = j.value("time_nodes", c.time_nodes);
    c.refine = j.value("refine", c.refine);
    c.seed = j.value("seed", c.seed);
    c.out = j.value("out", c.out);
    if (j.contains("epsilons")) c.epsilons = j.at("epsilons").get<std::vector<double>>();
    if (j.contains("deltas")) c.deltas = j.at("deltas").get<std::vector<double>>();
    c.pairs_per_delta = j.value("pairs_per_delta", c.pairs_per_delta);
    c.samples = j.value("samples", c.samples);
    c.num_weights = j.value("num_weights", c.num_weights);
    c.depth = j.value("depth", c.depth);
    c.sigma_budget = j.value("sigma_budget", c.sigma_budget);
    c.power_tol = j.value("power_tol", c.power_tol);
    c.power_iters = j.value("power_iters", c.power_iters);
    c.stability_threshold = j.value("stability_threshold", c.stability_threshold);
    c.validate();
    return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw config_error(std::string("config parse error: ") + e.what());
    }
    return from_json(j);
}

nlohmann::json ExperimentConfig::to_json() const {
    return nlohmann::json{
        {"experiment", to_string(experiment)},
        {"grid", {{"m", grid_m}, {"n", grid_n}, {"L", grid_L}}},
        {"d", d},
        {"weight",
         {{"family", weight.family}, {"params", weight.params}, {"file", weight.file}}},
        {"time_nodes", time_nodes},
        {"refine", refine},
        {"seed", seed},
        {"out", out},
        {"epsilons", epsilons},
        {"deltas", deltas},
        {"pairs_per_delta", pairs_per_delta},
        {"samples", samples},
        {"num_weights", num_weights},
        {"depth", depth},
        {"sigma_budget", sigma_budget},
        {"power_tol", power_tol},
        {"power_iters", power_iters},
        {"stability_threshold", stability_threshold},
    };
}

void ExperimentConfig::validate() const {
    GridSpec grid{grid_m, grid_n, grid_L};
    grid.validate();
    if (d < 1 || d > kMaxDim) throw config_error("config: d must be in [1,8]");
    if (time_nodes < 2) throw config_error("config: time_nodes must be >= 2");
    if (refine < 0 || refine > 8) throw config_error("config: refine must be in [0,8]");
    if (pairs_per_delta < 1) throw config_error("config: pairs_per_delta must be >= 1");
    if (samples < 1) throw config_error("config: samples must be >= 1");
    if (num_weights < 1) throw config_error("config: num_weights must be >= 1");
    if (depth < 1 || depth > 8) throw config_error("config: depth must be in [1,8]");
    if (sigma_budget < 1) throw config_error("config: sigma_budget must be >= 1");
    if (!(power_tol > 0.0)) throw config_error("config: power_tol must be positive");
    if (power_iters < 1) throw config_error("config: power_iters must be >= 1");
    if (!(stability_threshold > 0.0))
        throw config_error("config: stability_threshold must be positive");
    if (!weight.file.empty() && !std::filesystem::exists(weight.file))
        throw config_error("config: weight file does not exist: " + weight.file);
    (void)weight_family_from_string(weight.family);
    for (double e : epsilons)
        if (!(e >= 0.0)) throw config_error("config: epsilons must be nonnegative");
    for (double dl : deltas)
        if (!(dl > 0.0)) throw config_error("config: deltas must be positive");
}

std::string ExperimentConfig::hash() const {
    const std::string canonical = to_json().dump();
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : canonical) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

namespace {

std::string fmt_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
}

std::string fmt_num(std::int64_t v) {
    return std::to_string(v);
}

/// Append-only CSV: columns are fixed per experiment and documented in the
/// README; every row starts with the config hash.
class CsvWriter {
  public:
    CsvWriter(std::string path, std::vector<std::string> header)
        : path_(std::move(path)), header_(std::move(header)) {}

    void row(const std::vector<std::string>& cells) {
        if (cells.size() != header_.size())
            throw numeric_error("csv: row width does not match header");
        rows_.push_back(cells);
    }

    void write() const {
        std::ofstream out(path_, std::ios::trunc);
        if (!out) throw config_error("csv: cannot open " + path_);
        for (std::size_t i = 0; i < header_.size(); ++i)
            out << (i ? "," : "") << header_[i];
        out << "\n";
        for (const auto& r : rows_) {
            for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i];
            out << "\n";
        }
    }

  private:
    std::string path_;
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

WeightField build_weight(const ExperimentConfig& config, const GridSpec& grid, int d,
                         const std::vector<double>& params, Exec exec) {
    if (!config.weight.file.empty()) return load_field(config.weight.file);
    return make_family(weight_family_from_string(config.weight.family), params, grid, d,
                       config.seed, exec);
}

std::string pattern_label(const SignPattern& pattern) {
    std::string s;
    for (std::size_t i = 0; i < pattern.axes.size(); ++i) {
        s += pattern.signs[i] > 0 ? '+' : '-';
        s += 'R';
        s += static_cast<char>('0' + pattern.axes[i]);
        s += '2';
        if (i + 1 < pattern.axes.size()) s += ' ';
    }
    return s;
}

}  // namespace

VectorField random_bump_field(const GridSpec& grid, int d, std::uint64_t seed, int bumps) {
    Rng rng(seed);
    VectorField f = VectorField::zeros(grid, d);
    for (int b = 0; b < bumps; ++b) {
        std::vector<double> center(grid.m);
        for (int a = 0; a < grid.m; ++a) center[a] = rng.uniform(0.0, grid.L);
        // Widths live in a fixed physical band so one seed means one
        // function at every resolution; L/20 keeps bumps resolvable from
        // n = 64 upward.
        const double width = rng.uniform(grid.L / 20.0, grid.L / 10.0);
        CVec direction(d);
        for (int c = 0; c < d; ++c) direction(c) = rng.normal_complex();
        f += bump_vector_field(center, width, direction, grid);
    }
    f.remove_mean();
    return f;
}

double calibrate_family_to_heat_delta(const ExperimentConfig& config, double target_delta,
                                      const GridSpec& grid, int d, Exec exec,
                                      WeightField* out_weight, double* out_param) {
    if (config.weight.family == "identity")
        throw config_error("calibration: identity family cannot reach a positive delta");
    const WeightFamily family = weight_family_from_string(config.weight.family);
    std::vector<double> params = config.weight.params;
    if (params.empty()) params = {0.1};
    const TimeGrid tgrid = TimeGrid::for_grid(grid, config.time_nodes);

    auto excess_at = [&](double eps) {
        std::vector<double> p = params;
        p[0] = eps;
        WeightField w = make_family(family, p, grid, d, config.seed, exec);
        const double characteristic = heat_a2_characteristic(w, tgrid, config.refine, exec);
        if (out_weight != nullptr) *out_weight = std::move(w);
        return characteristic - 1.0;
    };

    double hi = params[0] > 0.0 ? params[0] : 0.1;
    double excess = excess_at(hi);
    int guard = 0;
    while (excess < target_delta) {
        hi *= 2.0;
        if (++guard > 12) throw numeric_error("calibration: family cannot reach target delta");
        excess = excess_at(hi);
    }
    double lo = 0.0;
    double eps = hi;
    for (int iter = 0; iter < 50; ++iter) {
        if (std::abs(excess - target_delta) <= 0.02 * target_delta) break;
        const double mid = 0.5 * (lo + hi);
        excess = excess_at(mid);
        eps = mid;
        if (excess > target_delta)
            hi = mid;
        else
            lo = mid;
    }
    if (out_param != nullptr) *out_param = eps;
    return excess;
}

namespace {

struct ExperimentOutput {
    double headline = 0.0;
    nlohmann::json headline_details;
    std::vector<std::string> outputs;
};

ExperimentOutput run_a2h(const ExperimentConfig& config, Exec exec) {
    const GridSpec grid{config.grid_m, config.grid_n, config.grid_L};
    WeightField w = build_weight(config, grid, config.d, config.weight.params, exec);
    const TimeGrid tgrid = TimeGrid::for_grid(grid, config.time_nodes);
    A2Result details;
    const double value = heat_a2_characteristic(w, tgrid, config.refine, exec, &details);

    double refine_drift = 0.0;
    if (details.refine_values.size() >= 2) {
        const double a = details.refine_values[details.refine_values.size() - 2];
        const double b = details.refine_values.back();
        refine_drift = std::abs(b - a) / std::max(1.0, std::abs(b));
    }

    const std::string csv_path = config.out + "/a2h.csv";
    CsvWriter csv(csv_path, {"config_hash", "family", "param0", "m", "n", "L", "d",
                             "time_nodes", "refine", "characteristic", "refine_drift",
                             "arg_x1", "arg_x2", "arg_t"});
    csv.row({config.hash(), config.weight.family,
             fmt_num(config.weight.params.empty() ? 0.0 : config.weight.params[0]),
             fmt_num(std::int64_t(grid.m)), fmt_num(std::int64_t(grid.n)), fmt_num(grid.L),
             fmt_num(std::int64_t(config.d)), fmt_num(std::int64_t(config.time_nodes)),
             fmt_num(std::int64_t(config.refine)), fmt_num(value), fmt_num(refine_drift),
             fmt_num(details.arg_x[0]), fmt_num(details.arg_x[1]), fmt_num(details.arg_t)});
    csv.write();

    const std::string weight_path = config.out + "/weight.mwlf";
    save_field(w, weight_path);

    ExperimentOutput out;
    out.headline = value;
    out.headline_details = {{"characteristic", value}, {"refine_drift", refine_drift}};
    out.outputs = {csv_path, weight_path, weight_path + ".json"};
    return out;
}

ExperimentOutput run_riesz_norm(const ExperimentConfig& config, Exec exec) {
    const GridSpec grid{config.grid_m, config.grid_n, config.grid_L};
    WeightField w = build_weight(config, grid, config.d, config.weight.params, exec);
    const TimeGrid tgrid = TimeGrid::for_grid(grid, config.time_nodes);
    const double characteristic = heat_a2_characteristic(w, tgrid, config.refine, exec);
    const double excess = std::max(0.0, characteristic - 1.0);

    PowerIterOptions options;
    options.tol = config.power_tol;
    options.iters = config.power_iters;
    options.seed = config.seed;

    const std::string csv_path = config.out + "/riesz_norm.csv";
    CsvWriter csv(csv_path, {"config_hash", "pattern", "unweighted_norm", "weighted_norm",
                             "characteristic", "norm_excess", "normalized_excess",
                             "iterations"});
    double max_norm = 0.0;
    for (const SignPattern& pattern : SignPattern::all_nonempty(grid.m)) {
        const MultiplierOp op = MultiplierOp::riesz_square_sum(grid, pattern);
        PowerIterResult details;
        const double norm = weighted_norm(op, w, options, &details, exec);
        max_norm = std::max(max_norm, norm);
        const double normalized =
            excess > 0.0 ? (norm - 1.0) / std::sqrt(excess) : 0.0;
        csv.row({config.hash(), pattern_label(pattern), fmt_num(op.unweighted_norm()),
                 fmt_num(norm), fmt_num(characteristic), fmt_num(norm - 1.0),
                 fmt_num(normalized), fmt_num(std::int64_t(details.iterations))});
    }
    csv.write();

    ExperimentOutput out;
    out.headline = max_norm;
    out.headline_details = {{"max_weighted_norm", max_norm},
                            {"characteristic", characteristic}};
    out.outputs = {csv_path};
    return out;
}

ExperimentOutput run_lp(const ExperimentConfig& config, Exec exec) {
    const GridSpec grid{config.grid_m, config.grid_n, config.grid_L};
    const TimeGrid tgrid = TimeGrid::for_grid(grid, config.time_nodes);

    const std::string csv_path = config.out + "/lp.csv";
    CsvWriter csv(csv_path, {"config_hash", "delta_target", "delta", "param0", "pair", "lhs",
                             "rhs_f", "rhs_g", "ratio", "tail_bound", "excess_over_sqrt_delta"});

    const bool identity = config.weight.family == "identity" && config.weight.file.empty();
    std::vector<double> bands = identity ? std::vector<double>{0.0} : config.deltas;

    double c_uniform = 0.0;
    for (std::size_t bi = 0; bi < bands.size(); ++bi) {
        WeightField w = WeightField::identity(grid, config.d);
        double delta = 0.0;
        double param = 0.0;
        if (!identity)
            delta = calibrate_family_to_heat_delta(config, bands[bi], grid, config.d, exec,
                                                   &w, &param);
        for (int pair = 0; pair < config.pairs_per_delta; ++pair) {
            const std::uint64_t fseed =
                config.seed ^ (0x1000u + 2u * (bi * config.pairs_per_delta + pair));
            const VectorField f = random_bump_field(grid, config.d, fseed);
            const VectorField g = random_bump_field(grid, config.d, fseed + 1);
            const LPReport report = lp_report(f, g, w, tgrid, exec);
            const double normalized =
                delta > 0.0 ? std::max(0.0, report.ratio - 1.0) / std::sqrt(delta) : 0.0;
            c_uniform = std::max(c_uniform, normalized);
            csv.row({config.hash(), fmt_num(bands[bi]), fmt_num(delta), fmt_num(param),
                     fmt_num(std::int64_t(pair)), fmt_num(report.lhs), fmt_num(report.rhs_f),
                     fmt_num(report.rhs_g), fmt_num(report.ratio), fmt_num(report.tail_bound),
                     fmt_num(normalized)});
        }
    }
    csv.write();

    ExperimentOutput out;
    out.headline = c_uniform;
    out.headline_details = {{"uniform_c", c_uniform}};
    out.outputs = {csv_path};
    return out;
}

ExperimentOutput run_duality(const ExperimentConfig& config, Exec exec) {
    const GridSpec grid{config.grid_m, config.grid_n, config.grid_L};
    const TimeGrid tgrid = TimeGrid::for_grid(grid, config.time_nodes);

    const std::string csv_path = config.out + "/duality.csv";
    CsvWriter csv(csv_path, {"config_hash", "case", "axis", "quadratic_form",
                             "gradient_pairing", "residual"});
    double max_residual = 0.0;
    for (int c = 0; c < config.num_weights; ++c) {
        Rng rng = Rng::task_stream(config.seed, 0x2000u + c);
        std::vector<double> c1(grid.m), c2(grid.m);
        for (int a = 0; a < grid.m; ++a) {
            c1[a] = rng.uniform(0.0, grid.L);
            c2[a] = rng.uniform(0.0, grid.L);
        }
        const double w1 = rng.uniform(grid.L / 20.0, grid.L / 10.0);
        const double w2 = rng.uniform(grid.L / 20.0, grid.L / 10.0);
        CVec one(1);
        one(0) = cplx(1.0, 0.0);
        VectorField phi = bump_vector_field(c1, w1, one, grid);
        VectorField psi = bump_vector_field(c2, w2, one, grid);
        phi.remove_mean();
        psi.remove_mean();
        for (int axis = 1; axis <= grid.m; ++axis) {
            const DualityReport report = duality_check(phi, psi, axis, tgrid, exec);
            max_residual = std::max(max_residual, report.residual);
            csv.row({config.hash(), fmt_num(std::int64_t(c)), fmt_num(std::int64_t(axis)),
                     fmt_num(report.quadratic_form), fmt_num(report.gradient_pairing),
                     fmt_num(report.residual)});
        }
    }
    csv.write();

    ExperimentOutput out;
    out.headline = max_residual;
    out.headline_details = {{"max_residual", max_residual}};
    out.outputs = {csv_path};
    return out;
}

ExperimentOutput run_martingale(const ExperimentConfig& config, Exec exec) {
    if (config.d > 4) throw config_error("martingale: d must be <= 4 for exact norms");
    const std::string csv_path = config.out + "/martingale.csv";
    CsvWriter csv(csv_path,
                  {"config_hash", "eps", "depth", "d", "dyadic_a2", "sup_norm", "exhaustive",
                   "evaluated", "norm_excess", "sqrt_excess", "normalized_excess",
                   "degenerate_frames"});

    const WeightFamily family = weight_family_from_string(
        config.weight.family == "identity" ? "diagonal_exp" : config.weight.family);
    std::vector<std::pair<double, double>> fit_pairs;
    for (double eps : config.epsilons) {
        std::vector<double> params = config.weight.params;
        if (params.empty()) params = {eps};
        params[0] = eps;
        const GridSpec grid{1, std::max(16, 1 << config.depth), config.grid_L};
        const WeightField w = make_family(family, params, grid, config.d, config.seed, exec);
        const DyadicWeightTree tree = build_tree(
            coarsen_leaves(dyadic_leaves_from_field(w), std::size_t(1) << config.depth));
        const double a2 = dyadic_a2(tree);
        const SupSigmaResult sup =
            sup_sigma_norm(tree, config.sigma_budget, config.seed, exec);
        const double excess = std::max(0.0, a2 - 1.0);
        const double sqrt_excess = std::sqrt(excess);
        const double normalized = sqrt_excess > 0.0 ? (sup.norm - 1.0) / sqrt_excess : 0.0;
        if (sqrt_excess > 0.0) fit_pairs.push_back({sqrt_excess, sup.norm - 1.0});
        csv.row({config.hash(), fmt_num(eps), fmt_num(std::int64_t(config.depth)),
                 fmt_num(std::int64_t(config.d)), fmt_num(a2), fmt_num(sup.norm),
                 sup.exhaustive ? "1" : "0", fmt_num(sup.evaluated), fmt_num(sup.norm - 1.0),
                 fmt_num(sqrt_excess), fmt_num(normalized), tree.degenerate ? "1" : "0"});
    }
    csv.write();

    ExperimentOutput out;
    out.outputs = {csv_path};
    if (fit_pairs.size() >= 4) {
        const FitResult fit = fit_constant(fit_pairs);
        const std::string fit_path = config.out + "/fit.json";
        std::ofstream fj(fit_path, std::ios::trunc);
        fj << fit.to_json().dump(2) << "\n";
        out.outputs.push_back(fit_path);
        out.headline = fit.fitted_c;
        out.headline_details = {{"fitted_c", fit.fitted_c}, {"residual", fit.residual}};
    }
    return out;
}

ExperimentOutput run_bellman_sweep(const ExperimentConfig& config, Exec exec) {
    const std::vector<SizeBoundRow> rows =
        size_bound_sweep(config.deltas, config.samples, config.seed, exec);

    const std::string csv_path = config.out + "/bellman_sweep.csv";
    CsvWriter csv(csv_path,
                  {"config_hash", "delta", "max_ratio", "c_delta", "band_hit", "samples"});
    double worst_c = 0.0;
    for (const SizeBoundRow& row : rows) {
        worst_c = std::max(worst_c, row.c_delta);
        csv.row({config.hash(), fmt_num(row.delta), fmt_num(row.max_ratio),
                 fmt_num(row.c_delta), row.band_hit ? "1" : "0",
                 fmt_num(std::int64_t(row.samples))});
    }
    csv.write();

    ExperimentOutput out;
    out.headline = worst_c;
    out.headline_details = {{"max_c_delta", worst_c}};
    out.outputs = {csv_path};
    return out;
}

ExperimentOutput run_full_sweep(const ExperimentConfig& config, Exec exec) {
    const GridSpec grid{config.grid_m, config.grid_n, config.grid_L};
    const TimeGrid tgrid = TimeGrid::for_grid(grid, config.time_nodes);
    const WeightFamily family = weight_family_from_string(
        config.weight.family == "identity" ? "diagonal_exp" : config.weight.family);

    PowerIterOptions options;
    options.tol = config.power_tol;
    options.iters = config.power_iters;
    options.seed = config.seed;

    const std::string csv_path = config.out + "/full_sweep.csv";
    CsvWriter csv(csv_path, {"config_hash", "eps", "characteristic", "char_excess",
                             "max_weighted_norm", "norm_excess", "normalized_excess"});
    std::vector<std::pair<double, double>> fit_pairs;
    for (double eps : config.epsilons) {
        std::vector<double> params = config.weight.params;
        if (params.empty()) params = {eps};
        params[0] = eps;
        const WeightField w = make_family(family, params, grid, config.d, config.seed, exec);
        const double characteristic = heat_a2_characteristic(w, tgrid, config.refine, exec);
        double max_norm = 0.0;
        for (const SignPattern& pattern : SignPattern::all_nonempty(grid.m)) {
            const MultiplierOp op = MultiplierOp::riesz_square_sum(grid, pattern);
            max_norm = std::max(max_norm, weighted_norm(op, w, options, nullptr, exec));
        }
        const double excess = std::max(0.0, characteristic - 1.0);
        const double sqrt_excess = std::sqrt(excess);
        if (sqrt_excess > 0.0) fit_pairs.push_back({sqrt_excess, max_norm - 1.0});
        csv.row({config.hash(), fmt_num(eps), fmt_num(characteristic), fmt_num(excess),
                 fmt_num(max_norm), fmt_num(max_norm - 1.0),
                 fmt_num(sqrt_excess > 0.0 ? (max_norm - 1.0) / sqrt_excess : 0.0)});
    }
    csv.write();

    ExperimentOutput out;
    out.outputs = {csv_path};
    if (fit_pairs.size() >= 4) {
        const FitResult fit = fit_constant(fit_pairs);
        const std::string fit_path = config.out + "/fit.json";
        std::ofstream fj(fit_path, std::ios::trunc);
        fj << fit.to_json().dump(2) << "\n";
        out.outputs.push_back(fit_path);
        out.headline = fit.fitted_c;
        out.headline_details = {{"fitted_c", fit.fitted_c}, {"residual", fit.residual}};
    }
    return out;
}

std::string iso_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return std::string(buf);
}

}  // namespace

nlohmann::json FitResult::to_json() const {
    nlohmann::json jp = nlohmann::json::array();
    for (const auto& [x, y] : pairs) jp.push_back({{"sqrt_excess", x}, {"norm_excess", y}});
    return nlohmann::json{{"pairs", jp},
                          {"fitted_c", fitted_c},
                          {"residual", residual},
                          {"band", {band.first, band.second}}};
}

FitResult fit_constant(const std::vector<std::pair<double, double>>& pairs) {
    if (pairs.size() < 4) throw config_error("fit_constant: need at least 4 pairs");
    for (const auto& [x, y] : pairs)
        if (!(x > 0.0)) throw config_error("fit_constant: abscissas must be positive");
    FitResult fit;
    fit.pairs = pairs;
    std::sort(fit.pairs.begin(), fit.pairs.end());
    const std::size_t half = std::max<std::size_t>(2, fit.pairs.size() / 2);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < half; ++i) {
        sxy += fit.pairs[i].first * fit.pairs[i].second;
        sxx += fit.pairs[i].first * fit.pairs[i].first;
    }
    fit.fitted_c = std::max(0.0, sxy / sxx);
    double residual = 0.0;
    for (std::size_t i = 0; i < half; ++i) {
        const double predicted = fit.fitted_c * fit.pairs[i].first;
        const double scale = std::max(std::abs(fit.pairs[i].second), 1e-12);
        residual = std::max(residual, std::abs(fit.pairs[i].second - predicted) / scale);
    }
    fit.residual = residual;
    fit.band = {fit.pairs.front().first, fit.pairs[half - 1].first};
    return fit;
}

RunResult run(const ExperimentConfig& config, Exec exec) {
    config.validate();
    std::filesystem::create_directories(config.out);
    const auto t0 = std::chrono::steady_clock::now();
    const std::string started = iso_now();

    ExperimentOutput result;
    switch (config.experiment) {
        case Experiment::a2h: result = run_a2h(config, exec); break;
        case Experiment::riesz_norm: result = run_riesz_norm(config, exec); break;
        case Experiment::lp: result = run_lp(config, exec); break;
        case Experiment::duality: result = run_duality(config, exec); break;
        case Experiment::martingale: result = run_martingale(config, exec); break;
        case Experiment::bellman_sweep: result = run_bellman_sweep(config, exec); break;
        case Experiment::full_sweep: result = run_full_sweep(config, exec); break;
    }

    const auto t1 = std::chrono::steady_clock::now();
    RunResult run_result;
    run_result.outputs = result.outputs;
    run_result.headline = result.headline;
    run_result.manifest = nlohmann::json{
        {"experiment", to_string(config.experiment)},
        {"config", config.to_json()},
        {"config_hash", config.hash()},
        {"seed", config.seed},
        {"version", "1.0.0"},
        {"threads", max_threads()},
        {"wall_ms",
         std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count()},
        {"outputs", result.outputs},
        {"headline", result.headline_details},
        {"started", started},
        {"finished", iso_now()},
    };
    std::ofstream manifest(config.out + "/manifest.json", std::ios::trunc);
    if (!manifest) throw config_error("run: cannot write manifest");
    manifest << run_result.manifest.dump(2) << "\n";
    run_result.outputs.push_back(config.out + "/manifest.json");
    return run_result;
}

StabilityReport stability_check(const ExperimentConfig& config, Exec exec) {
    if (config.experiment == Experiment::duality)
        throw config_error("stability_check: duality has fixed cases and no refinement");
    if (!config.weight.file.empty())
        throw config_error("stability_check: file-based weights cannot be refined");

    ExperimentConfig base = config;
    base.out = config.out + "/base";
    ExperimentConfig fine = config;
    fine.out = config.out + "/refined";
    fine.time_nodes = config.time_nodes * 2;
    if (config.experiment == Experiment::martingale ||
        config.experiment == Experiment::bellman_sweep) {
        fine.depth = std::min(8, config.depth + 1);
    } else {
        fine.grid_n = config.grid_n * 2;
    }

    const RunResult base_result = run(base, exec);
    const RunResult fine_result = run(fine, exec);

    StabilityReport report;
    report.base = base_result.headline;
    report.refined = fine_result.headline;
    report.drift = std::abs(report.refined - report.base) /
                   std::max(std::abs(report.base), 1e-6);
    report.pass = report.drift < config.stability_threshold;
    report.details = nlohmann::json{
        {"base", report.base},
        {"refined", report.refined},
        {"drift", report.drift},
        {"threshold", config.stability_threshold},
        {"pass", report.pass},
    };
    return report;
}

}  // namespace mwlab
