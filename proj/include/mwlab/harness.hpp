#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "mwlab/exec.hpp"
#include "mwlab/weight_field.hpp"

namespace mwlab {

/// Experiment selector. Each experiment writes one CSV with a fixed header
/// plus a JSON run manifest; full_sweep and martingale add a fit JSON.
enum class Experiment {
    a2h,
    riesz_norm,
    lp,
    duality,
    martingale,
    bellman_sweep,
    full_sweep,
};

Experiment experiment_from_string(const std::string& name);
std::string to_string(Experiment e);

struct WeightSpec {
    std::string family = "identity";
    std::vector<double> params;
    std::string file;  // when nonempty, load instead of generating
};

struct ExperimentConfig {
    Experiment experiment = Experiment::a2h;
    int grid_m = 1;
    int grid_n = 128;
    double grid_L = 1.0;
    int d = 2;
    WeightSpec weight;
    int time_nodes = 96;
    int refine = 2;
    std::uint64_t seed = 1;
    std::string out = "runs/out";
    std::vector<double> epsilons{0.05, 0.1, 0.2, 0.3, 0.4};
    std::vector<double> deltas{0.01, 0.04, 0.09, 0.16, 0.25};
    int pairs_per_delta = 20;
    int samples = 100;
    int num_weights = 5;
    int depth = 4;
    int sigma_budget = 200;
    double power_tol = 1e-8;
    int power_iters = 2000;
    double stability_threshold = 0.01;

    static ExperimentConfig from_json(const nlohmann::json& j);
    static ExperimentConfig from_file(const std::string& path);
    nlohmann::json to_json() const;
    void validate() const;
    /// FNV-1a over the canonical serialization; joins CSV rows to manifests.
    std::string hash() const;
};

struct RunResult {
    nlohmann::json manifest;
    std::vector<std::string> outputs;
    /// Headline scalar per experiment (characteristic, max ratio, fitted_c, ...).
    double headline = 0.0;
};

/// Dispatches the configured experiment, writes CSV rows plus the manifest
/// under config.out, and returns the manifest. Deterministic given config
/// and seed (timestamps live only in the manifest).
RunResult run(const ExperimentConfig& config, Exec exec = Exec::par);

struct FitResult {
    std::vector<std::pair<double, double>> pairs;  // (sqrt(char - 1), norm excess)
    double fitted_c = 0.0;
    double residual = 0.0;
    std::pair<double, double> band{0.0, 0.0};  // abscissa range used for the fit

    nlohmann::json to_json() const;
};

/// Least-squares slope through the origin on the half of the data with the
/// smallest abscissas; residual is the max relative deviation on that half.
/// Needs at least 4 pairs with positive abscissas.
FitResult fit_constant(const std::vector<std::pair<double, double>>& pairs);

struct StabilityReport {
    double base = 0.0;
    double refined = 0.0;
    double drift = 0.0;  // relative
    bool pass = false;
    nlohmann::json details;
};

/// Reruns the experiment at doubled spatial resolution (depth + 1 for the
/// dyadic experiments) and doubled time-node count; reports the relative
/// drift of the headline quantity. duality has fixed cases and is rejected.
StabilityReport stability_check(const ExperimentConfig& config, Exec exec = Exec::par);

/// Mean-zero sum of seeded Gaussian bumps whose parameters are drawn in
/// physical units, so one seed describes the same function at any grid
/// resolution.
VectorField random_bump_field(const GridSpec& grid, int d, std::uint64_t seed, int bumps = 3);

/// Bisects the configured family strength until the heat characteristic
/// excess lands within 2% of target_delta; returns the achieved excess and
/// optionally the calibrated weight and parameter.
double calibrate_family_to_heat_delta(const ExperimentConfig& config, double target_delta,
                                      const GridSpec& grid, int d, Exec exec,
                                      WeightField* out_weight = nullptr,
                                      double* out_param = nullptr);

}  // namespace mwlab
