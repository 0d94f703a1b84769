// Benchmark comparing the serial reference path against the OpenMP kernels.
// Each case runs both policies on identical inputs, times them, and checks
// that the results agree bit-for-bit (slot-based reductions make the two
// paths deterministic).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "mwlab/bellman.hpp"
#include "mwlab/harness.hpp"
#include "mwlab/heat.hpp"
#include "mwlab/lp.hpp"
#include "mwlab/riesz.hpp"

namespace {

using mwlab::Exec;

double time_ms(const std::function<double(Exec)>& fn, Exec exec, double* result) {
    namespace chrono = std::chrono;
    const auto t0 = chrono::steady_clock::now();
    *result = fn(exec);
    const auto t1 = chrono::steady_clock::now();
    return chrono::duration<double, std::milli>(t1 - t0).count();
}

struct Case {
    std::string name;
    std::function<double(Exec)> fn;
};

}  // namespace

int main() {
    std::vector<Case> cases;

    cases.push_back({"make_family random_smooth m=2 n=64 d=3", [](Exec exec) {
        const mwlab::GridSpec grid{2, 64, 1.0};
        const mwlab::WeightField w =
            mwlab::make_family(mwlab::WeightFamily::random_smooth, {0.3, 3.0}, grid, 3, 7, exec);
        double checksum = 0.0;
        for (const mwlab::cplx& v : w.values) checksum += std::abs(v);
        return checksum;
    }});

    cases.push_back({"heat_a2_characteristic m=1 n=512 d=2", [](Exec exec) {
        const mwlab::GridSpec grid{1, 512, 1.0};
        const mwlab::WeightField w =
            mwlab::make_family(mwlab::WeightFamily::diagonal_exp, {0.4}, grid, 2, 0, exec);
        return mwlab::heat_a2_characteristic(w, mwlab::TimeGrid::for_grid(grid, 96), 2, exec);
    }});

    cases.push_back({"lp_lhs m=2 n=64 d=2", [](Exec exec) {
        const mwlab::GridSpec grid{2, 64, 1.0};
        const mwlab::VectorField f = mwlab::random_bump_field(grid, 2, 11);
        const mwlab::VectorField g = mwlab::random_bump_field(grid, 2, 12);
        return mwlab::lp_lhs(f, g, mwlab::TimeGrid::for_grid(grid, 96), exec);
    }});

    cases.push_back({"weighted_norm R1^2 m=1 n=256 d=2", [](Exec exec) {
        const mwlab::GridSpec grid{1, 256, 1.0};
        const mwlab::WeightField w =
            mwlab::make_family(mwlab::WeightFamily::diagonal_exp, {0.3}, grid, 2, 0, exec);
        mwlab::SignPattern pattern;
        pattern.axes = {1};
        pattern.signs = {1};
        const mwlab::MultiplierOp op = mwlab::MultiplierOp::riesz_square_sum(grid, pattern);
        mwlab::PowerIterOptions options;
        options.seed = 3;
        return mwlab::weighted_norm(op, w, options, nullptr, exec);
    }});

    cases.push_back({"sup_sigma_norm depth=4 d=2 budget=64", [](Exec exec) {
        const mwlab::GridSpec grid{1, 16, 1.0};
        const mwlab::WeightField w =
            mwlab::make_family(mwlab::WeightFamily::rotated_diagonal, {0.4, 0.7}, grid, 2, 0, exec);
        const mwlab::DyadicWeightTree tree =
            mwlab::build_tree(mwlab::dyadic_leaves_from_field(w));
        return mwlab::sup_sigma_norm(tree, 64, 5, exec).norm;
    }});

    cases.push_back({"size_bound_sweep 2 deltas x 6 samples", [](Exec exec) {
        const auto rows = mwlab::size_bound_sweep({0.04, 0.16}, 6, 9, exec);
        double acc = 0.0;
        for (const auto& row : rows) acc += row.max_ratio;
        return acc;
    }});

    std::printf("%-42s %12s %12s %9s %s\n", "kernel", "serial ms", "openmp ms", "speedup",
                "match");
    int mismatches = 0;
    for (const Case& c : cases) {
        double serial_result = 0.0, parallel_result = 0.0;
        const double serial_ms = time_ms(c.fn, Exec::serial, &serial_result);
        const double parallel_ms = time_ms(c.fn, Exec::par, &parallel_result);
        const bool match = serial_result == parallel_result;
        if (!match) ++mismatches;
        std::printf("%-42s %12.2f %12.2f %8.2fx %s\n", c.name.c_str(), serial_ms, parallel_ms,
                    serial_ms / parallel_ms, match ? "exact" : "MISMATCH");
    }
    std::printf("threads: %d\n", mwlab::max_threads());
    return mismatches == 0 ? 0 : 1;
}
