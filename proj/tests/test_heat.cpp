#include <cmath>

#include "doctest.h"
#include "mwlab/heat.hpp"
#include "mwlab/rng.hpp"
#include "oracles.hpp"

using namespace mwlab;

namespace {

constexpr double kPi = 3.14159265358979323846;

VectorField single_mode(const GridSpec& grid, int k1, int k2, const CVec& direction) {
    VectorField f = VectorField::zeros(grid, static_cast<int>(direction.size()));
    for (std::int64_t p = 0; p < grid.points(); ++p) {
        const auto x = grid.coords(p);
        double phase = 2.0 * kPi * k1 * x[0] / grid.L;
        if (grid.m == 2) phase += 2.0 * kPi * k2 * x[1] / grid.L;
        const cplx e(std::cos(phase), std::sin(phase));
        for (int c = 0; c < f.d; ++c) f.values[p * f.d + c] = e * direction(c);
    }
    return f;
}

}  // namespace

TEST_CASE("time grid: log nodes, positive trapezoid weights, exact telescoping") {
    const TimeGrid tg = TimeGrid::log_spaced(1e-4, 1.0, 96);
    REQUIRE(tg.count() == 96);
    CHECK(tg.nodes.front() == 1e-4);
    CHECK(tg.nodes.back() == 1.0);
    for (int i = 0; i + 1 < tg.count(); ++i) CHECK(tg.nodes[i] < tg.nodes[i + 1]);
    double total = 0.0;
    for (double w : tg.weights) {
        CHECK(w > 0.0);
        total += w;
    }
    CHECK(std::abs(total - (1.0 - 1e-4)) <= 1e-12 * (1.0 - 1e-4));
    CHECK_THROWS_AS((void)TimeGrid::log_spaced(0.0, 1.0, 8), config_error);
    CHECK_THROWS_AS((void)TimeGrid::log_spaced(1.0, 0.5, 8), config_error);
}

TEST_CASE("heat slice: constants are fixed points, modes decay exactly") {
    const GridSpec grid{1, 64, 1.0};
    CVec c(2);
    c(0) = cplx(2.0, -1.0);
    c(1) = cplx(0.0, 3.0);
    VectorField constant = VectorField::zeros(grid, 2);
    for (std::int64_t p = 0; p < grid.points(); ++p)
        for (int j = 0; j < 2; ++j) constant.values[p * 2 + j] = c(j);
    const VectorField slice = heat_slice(constant, 0.37, Exec::serial);
    for (std::int64_t p = 0; p < grid.points(); ++p)
        CHECK((slice.at(p) - c).norm() < 1e-13);

    const VectorField mode = single_mode(grid, 3, 0, c);
    const double t = 0.01;
    const VectorField decayed = heat_slice(mode, t, Exec::serial);
    const double factor = std::exp(-t * std::pow(2.0 * kPi * 3.0 / grid.L, 2));
    for (std::int64_t p = 0; p < grid.points(); p += 11)
        CHECK((decayed.at(p) - factor * mode.at(p)).norm() < 1e-12 * c.norm());

    CHECK_THROWS_AS((void)heat_slice(mode, 0.0, Exec::serial), config_error);
    CHECK_THROWS_AS((void)heat_slice(mode, -1.0, Exec::serial), config_error);
}

TEST_CASE("heat slice of a Gaussian matches the closed-form convolution") {
    const GridSpec grid{1, 256, 1.0};
    const double width = grid.L / 12.0;
    const double center = 0.4;
    CVec one(1);
    one(0) = 1.0;
    const VectorField bump = bump_vector_field({center}, width, one, grid);

    for (double t : {grid.spacing() * grid.spacing(), 0.001, (grid.L / 8.0) * (grid.L / 8.0)}) {
        const VectorField slice = heat_slice(bump, t, Exec::serial);
        // k_t * gaussian(width) = gaussian(sqrt(width^2 + 2t)) scaled, periodized.
        const double s2 = width * width + 2.0 * t;
        const double amp = width / std::sqrt(s2);
        for (std::int64_t p = 0; p < grid.points(); p += 7) {
            const double x = grid.coords(p)[0];
            double expect = 0.0;
            for (int nu = -6; nu <= 6; ++nu) {
                const double u = x - center + nu * grid.L;
                expect += amp * std::exp(-u * u / (2.0 * s2));
            }
            CHECK(std::abs(slice.values[p] - expect) <= 1e-8);
        }
    }
}

TEST_CASE("semigroup property within 1e-10") {
    const GridSpec grid{1, 64, 1.0};
    const WeightField w =
        make_family(WeightFamily::random_smooth, {0.3, 3.0}, grid, 2, 9, Exec::serial);
    const double t1 = 0.003, t2 = 0.011;
    const WeightField two_step = heat_slice(heat_slice(w, t1, Exec::serial), t2, Exec::serial);
    const WeightField one_step = heat_slice(w, t1 + t2, Exec::serial);
    double worst = 0.0;
    for (std::size_t i = 0; i < two_step.values.size(); ++i)
        worst = std::max(worst, std::abs(two_step.values[i] - one_step.values[i]));
    CHECK(worst < 1e-10);
}

TEST_CASE("heat slices of HermPD fields stay HermPD") {
    const GridSpec grid{1, 64, 1.0};
    const WeightField w =
        make_family(WeightFamily::rotated_diagonal, {0.6, 0.5}, grid, 3, 0, Exec::serial);
    const TimeGrid tg = TimeGrid::for_grid(grid, 24);
    for (double t : tg.nodes) {
        const WeightField slice = heat_slice(w, t, Exec::serial);  // validates internally
        for (std::int64_t p = 0; p < grid.points(); p += 5) CHECK(psd_check(slice.value(p)));
    }
}

TEST_CASE("identity weight has characteristic exactly 1") {
    const GridSpec grid{1, 64, 1.0};
    const WeightField id = WeightField::identity(grid, 2);
    const TimeGrid tg = TimeGrid::for_grid(grid, 48);
    const double value = heat_a2_characteristic(id, tg, 2, Exec::serial);
    CHECK(std::abs(value - 1.0) <= 1e-10);
}

TEST_CASE("scalar oscillation: quadratic small-eps scaling and dense-scan oracle") {
    const GridSpec grid{1, 64, 1.0};
    const TimeGrid tg = TimeGrid::for_grid(grid, 48);
    double previous = 0.0;
    for (int i = 0; i < 3; ++i) {
        const double eps = 0.02 * (1 << i);
        const WeightField w =
            make_family(WeightFamily::scalar_oscillation, {eps}, grid, 1, 0, Exec::serial);
        const double excess = heat_a2_characteristic(w, tg, 2, Exec::serial) - 1.0;
        CHECK(excess > 0.0);
        if (previous > 0.0) {
            // Theta(eps^2): doubling eps quadruples the excess.
            CHECK(excess / previous == doctest::Approx(4.0).epsilon(0.15));
        }
        previous = excess;

        // Brute-force scan at 4x spatial and time resolution, no refinement.
        const GridSpec dense_grid{1, 256, 1.0};
        const WeightField dense_w =
            make_family(WeightFamily::scalar_oscillation, {eps}, dense_grid, 1, 0, Exec::serial);
        const double dense = heat_a2_characteristic(
            dense_w, TimeGrid::for_grid(dense_grid, 192), 0, Exec::serial);
        CHECK(std::abs((dense - 1.0) - excess) <= 0.01 * excess);
    }
}

TEST_CASE("block weight diag(w, Id) has the scalar characteristic") {
    const GridSpec grid{1, 64, 1.0};
    const TimeGrid tg = TimeGrid::for_grid(grid, 48);
    const WeightField scalar =
        make_family(WeightFamily::scalar_oscillation, {0.4}, grid, 1, 0, Exec::serial);
    const double scalar_char = heat_a2_characteristic(scalar, tg, 2, Exec::serial);

    WeightField block = WeightField::identity(grid, 3);
    std::vector<cplx> samples = block.values;
    for (std::int64_t p = 0; p < grid.points(); ++p)
        samples[p * 9] = scalar.values[p];  // (0,0) entry of the 3x3 block
    block = WeightField::from_samples(grid, 3, std::move(samples), Exec::serial);
    const double block_char = heat_a2_characteristic(block, tg, 2, Exec::serial);
    CHECK(block_char == doctest::Approx(scalar_char).epsilon(1e-10));
}

TEST_CASE("characteristic refinement is monotone and stabilizes") {
    const GridSpec grid{1, 128, 1.0};
    const WeightField w =
        make_family(WeightFamily::diagonal_exp, {0.5}, grid, 2, 0, Exec::serial);
    const TimeGrid tg = TimeGrid::for_grid(grid, 64);
    A2Result details;
    (void)heat_a2_characteristic(w, tg, 4, Exec::serial, &details);
    REQUIRE(details.refine_values.size() == 4);
    for (std::size_t i = 1; i < details.refine_values.size(); ++i)
        CHECK(details.refine_values[i] >= details.refine_values[i - 1]);
    const double last = details.refine_values[3];
    const double prev = details.refine_values[2];
    CHECK(std::abs(last - prev) / last < 1e-4);
}

TEST_CASE("pairing field: zero input, identity weight, and kernel-sum oracle") {
    const GridSpec grid{1, 128, 1.0};
    const WeightField w =
        make_family(WeightFamily::random_smooth, {0.3, 3.0}, grid, 2, 21, Exec::serial);

    const VectorField zero = VectorField::zeros(grid, 2);
    const VectorField zslice = heat_pairing_field(w, zero, 0.01, Exec::serial);
    for (const cplx& v : zslice.values) CHECK(std::abs(v) == 0.0);

    // With W = Id the pairing is |f|^2 and its slice the scalar heat slice.
    CVec dir(2);
    dir(0) = cplx(1.0, 0.5);
    dir(1) = cplx(-0.25, 0.0);
    const VectorField f = bump_vector_field({0.5}, grid.L / 12.0, dir, grid);
    const WeightField id = WeightField::identity(grid, 2);
    const VectorField id_pairing = heat_pairing_field(id, f, 0.004, Exec::serial);
    VectorField normsq = VectorField::zeros(grid, 1);
    for (std::int64_t p = 0; p < grid.points(); ++p)
        normsq.values[p] = f.at(p).squaredNorm();
    const VectorField expected = heat_slice(normsq, 0.004, Exec::serial);
    for (std::int64_t p = 0; p < grid.points(); p += 9)
        CHECK(std::abs(id_pairing.values[p] - expected.values[p]) < 1e-12);

    // Random weight: nonnegative everywhere and matching the direct
    // periodized-kernel quadrature at five points.
    const double t = 0.002;
    const VectorField pairing = heat_pairing_field(w, f, t, Exec::serial);
    std::vector<cplx> raw(grid.points());
    for (std::int64_t p = 0; p < grid.points(); ++p) {
        const CVec v = f.at(p);
        raw[p] = std::real(v.dot(w.value(p) * v));
    }
    for (const cplx& v : pairing.values) CHECK(std::real(v) >= -kTolPsd);
    Rng rng(31);
    for (int s = 0; s < 5; ++s) {
        const std::int64_t p = static_cast<std::int64_t>(rng.below(grid.points()));
        const cplx oracle = oracles::heat_direct_at(grid, raw, grid.coords(p), t);
        CHECK(std::abs(pairing.values[p] - oracle) < 1e-6);
    }
}
