#include <cmath>

#include "doctest.h"
#include "mwlab/bellman.hpp"
#include "mwlab/weight_field.hpp"

using namespace mwlab;

namespace {

CVec unit(int d, int k) {
    CVec v = CVec::Zero(d);
    v(k) = 1.0;
    return v;
}

BellmanPoint simple_point(double X, double Y, const CVec& x, const CVec& y) {
    BellmanPoint p;
    p.X = X;
    p.Y = Y;
    p.x = x;
    p.y = y;
    const int d = static_cast<int>(x.size());
    p.r = CMat::Identity(d, d);
    p.s = CMat::Identity(d, d);
    return p;
}

std::vector<CVec> random_leaf_vectors(Rng& rng, int count, int d) {
    std::vector<CVec> v(count);
    for (int i = 0; i < count; ++i) {
        v[i] = CVec(d);
        for (int c = 0; c < d; ++c) v[i](c) = rng.normal_complex();
    }
    return v;
}

std::vector<CMat> random_pd_leaves(Rng& rng, int count, int d, double strength = 0.3) {
    std::vector<CMat> leaves;
    for (int i = 0; i < count; ++i) {
        CMat h(d, d);
        for (int c = 0; c < d; ++c)
            for (int r = 0; r < d; ++r) h(r, c) = strength * rng.normal_complex();
        leaves.push_back(exp_herm(hermitize(h)));
    }
    return leaves;
}

WitnessConfig random_witness(Rng& rng, int depth, int d, double strength = 0.3) {
    const int leaves = 1 << depth;
    return make_witness(build_tree(random_pd_leaves(rng, leaves, d, strength)),
                        random_leaf_vectors(rng, leaves, d),
                        random_leaf_vectors(rng, leaves, d));
}

}  // namespace

TEST_CASE("in_domain: hand-checked points") {
    const int d = 2;
    const DomainMargins origin = in_domain(simple_point(1.0, 1.0, CVec::Zero(d), CVec::Zero(d)), 0.3);
    CHECK(origin.inside());
    CHECK(origin.margin_lower == doctest::Approx(0.0).epsilon(1e-12));  // ||Id Id|| = 1

    const DomainMargins boundary = in_domain(simple_point(1.0, 1.0, unit(d, 0), CVec::Zero(d)), 0.3);
    CHECK(boundary.inside());
    CHECK(boundary.margin_x == doctest::Approx(0.0).epsilon(1e-12));  // Id - e1 e1* touches 0

    const DomainMargins outside =
        in_domain(simple_point(1.0, 1.0, 2.0 * unit(d, 0), CVec::Zero(d)), 0.3);
    CHECK_FALSE(outside.inside());
    CHECK(outside.margin_x == doctest::Approx(-3.0).epsilon(1e-12));  // eigenvalue 1 - 4
}

TEST_CASE("in_domain is invariant under simultaneous unitary conjugation") {
    Rng rng(11);
    for (int trial = 0; trial < 25; ++trial) {
        const int d = 2 + static_cast<int>(rng.below(2));
        BellmanPoint p;
        p.X = std::exp(rng.normal());
        p.Y = std::exp(rng.normal());
        p.x = CVec(d);
        p.y = CVec(d);
        for (int c = 0; c < d; ++c) {
            p.x(c) = 0.5 * rng.normal_complex();
            p.y(c) = 0.5 * rng.normal_complex();
        }
        CMat h(d, d);
        for (int c = 0; c < d; ++c)
            for (int r = 0; r < d; ++r) h(r, c) = 0.2 * rng.normal_complex();
        p.r = exp_herm(hermitize(h));
        p.s = exp_herm(hermitize(CMat(-h)));

        // Random unitary from the eigenframe of a random Hermitian matrix.
        CMat g(d, d);
        for (int c = 0; c < d; ++c)
            for (int r = 0; r < d; ++r) g(r, c) = rng.normal_complex();
        const CMat u = eig_herm(hermitize(g)).vectors;

        BellmanPoint q;
        q.X = p.X;
        q.Y = p.Y;
        q.x = u * p.x;
        q.y = u * p.y;
        q.r = hermitize(u * p.r * u.adjoint());
        q.s = hermitize(u * p.s * u.adjoint());

        const double delta = 0.4;
        const DomainMargins mp = in_domain(p, delta);
        const DomainMargins mq = in_domain(q, delta);
        CHECK(mp.inside(1e-7) == mq.inside(1e-7));
        CHECK(mp.margin_x == doctest::Approx(mq.margin_x).epsilon(1e-9));
        CHECK(mp.margin_y == doctest::Approx(mq.margin_y).epsilon(1e-9));
        CHECK(mp.product_norm == doctest::Approx(mq.product_norm).epsilon(1e-9));
    }
}

TEST_CASE("semidefinite reduction agrees with dense direction sampling") {
    Rng rng(13);
    for (int trial = 0; trial < 10; ++trial) {
        const int d = 2;
        BellmanPoint p;
        p.X = 1.0;
        p.Y = 1.0;
        p.x = CVec(d);
        p.y = CVec(d);
        for (int c = 0; c < d; ++c) {
            p.x(c) = 0.6 * rng.normal_complex();
            p.y(c) = 0.6 * rng.normal_complex();
        }
        CMat h(d, d);
        for (int c = 0; c < d; ++c)
            for (int r = 0; r < d; ++r) h(r, c) = 0.3 * rng.normal_complex();
        p.r = exp_herm(hermitize(h));
        p.s = inverse_pd(p.r);

        const DomainMargins margins = in_domain(p, 1.0);
        bool direction_ok_x = true;
        bool direction_ok_y = true;
        for (int s = 0; s < 10000; ++s) {
            CVec e(d);
            for (int c = 0; c < d; ++c) e(c) = rng.normal_complex();
            e.normalize();
            const double lhs_x = std::abs(e.dot(p.x));
            const double rhs_x = std::sqrt(p.X * std::real(e.dot(p.s * e)));
            if (lhs_x > rhs_x + 1e-12) direction_ok_x = false;
            const double lhs_y = std::abs(e.dot(p.y));
            const double rhs_y = std::sqrt(p.Y * std::real(e.dot(p.r * e)));
            if (lhs_y > rhs_y + 1e-12) direction_ok_y = false;
        }
        // The all-directions statement holds iff the matrix margin is >= 0.
        CHECK(direction_ok_x == (margins.margin_x >= -1e-12));
        CHECK(direction_ok_y == (margins.margin_y >= -1e-12));
    }
}

TEST_CASE("every witness point lies in the domain of its own excess") {
    Rng rng(17);
    for (int trial = 0; trial < 10000; ++trial) {
        const int depth = 1 + static_cast<int>(rng.below(3));
        const int d = 1 + static_cast<int>(rng.below(2));
        const WitnessConfig config = random_witness(rng, depth, d);
        const double delta = dyadic_a2(config.tree) - 1.0;
        const DomainMargins margins = in_domain(config.derived_point(), delta);
        CHECK(margins.inside());
    }
}

TEST_CASE("witness value basics") {
    Rng rng(19);
    const int depth = 3;
    const int d = 2;
    const auto tree = build_tree(random_pd_leaves(rng, 8, d));
    const auto f_leaves = random_leaf_vectors(rng, 8, d);
    std::vector<CVec> g_const(8, CVec::Ones(d));
    const WitnessConfig config = make_witness(tree, f_leaves, g_const);
    CHECK(witness_value(config) == 0.0);
    (void)depth;
}

TEST_CASE("concatenation: derived point averages and the midpoint identity") {
    Rng rng(23);
    for (int trial = 0; trial < 1000; ++trial) {
        const int depth = 1 + static_cast<int>(rng.below(4));
        const int d = 1 + static_cast<int>(rng.below(2));
        const WitnessConfig a_plus = random_witness(rng, depth, d);
        const WitnessConfig a_minus = random_witness(rng, depth, d);
        const WitnessConfig both = concat_witnesses(a_plus, a_minus);

        const BellmanPoint pp = a_plus.derived_point();
        const BellmanPoint pm = a_minus.derived_point();
        const BellmanPoint pc = both.derived_point();
        CHECK(pc.X == doctest::Approx(0.5 * (pp.X + pm.X)).epsilon(1e-11));
        CHECK(pc.Y == doctest::Approx(0.5 * (pp.Y + pm.Y)).epsilon(1e-11));
        CHECK((pc.x - 0.5 * (pp.x + pm.x)).norm() <= kTolLin);
        CHECK((pc.y - 0.5 * (pp.y + pm.y)).norm() <= kTolLin);
        CHECK((pc.r - 0.5 * (pp.r + pm.r)).norm() <= kTolLin);
        CHECK((pc.s - 0.5 * (pp.s + pm.s)).norm() <= kTolLin);

        // Exact midpoint identity of the construction: the concatenated value
        // equals the average plus the root term.
        const double root_term =
            0.25 * std::abs(CVec(pp.y - pm.y).dot(CVec(pp.x - pm.x)));
        const double expected =
            0.5 * (witness_value(a_plus) + witness_value(a_minus)) + root_term;
        CHECK(witness_value(both) == doctest::Approx(expected).epsilon(1e-10));
        CHECK(witness_value(both) >= expected - kTolLin);  // the midpoint inequality
    }
}

TEST_CASE("concatenation corner cases") {
    Rng rng(29);
    const WitnessConfig a = random_witness(rng, 2, 2);

    // Equal halves: point unchanged, value preserved (root term vanishes).
    const WitnessConfig same = concat_witnesses(a, a);
    const BellmanPoint pa = a.derived_point();
    const BellmanPoint ps = same.derived_point();
    CHECK(ps.X == doctest::Approx(pa.X).epsilon(1e-12));
    CHECK((ps.x - pa.x).norm() <= kTolLin);
    CHECK(witness_value(same) == doctest::Approx(witness_value(a)).epsilon(1e-12));

    // Matching averages: the root term is zero, value is the plain average.
    WitnessConfig b = random_witness(rng, 2, 2);
    b.f.mean = a.f.mean;
    b.g.mean = a.g.mean;
    const WitnessConfig avg = concat_witnesses(a, b);
    CHECK(witness_value(avg) ==
          doctest::Approx(0.5 * (witness_value(a) + witness_value(b))).epsilon(1e-11));

    // A tight explicit delta can reject the averaged point.
    CHECK_THROWS_AS((void)concat_witnesses(a, b, 1e-15), numeric_error);
}

TEST_CASE("depth embedding with constant children preserves the value") {
    Rng rng(31);
    const WitnessConfig config = random_witness(rng, 3, 2);
    const std::vector<CVec> f_leaves = config.f.reconstruct();
    const std::vector<CVec> g_leaves = config.g.reconstruct();
    std::vector<CMat> leaves2;
    std::vector<CVec> f2, g2;
    for (std::size_t j = 0; j < config.tree.leaves.size(); ++j) {
        leaves2.push_back(config.tree.leaves[j]);
        leaves2.push_back(config.tree.leaves[j]);
        f2.push_back(f_leaves[j]);
        f2.push_back(f_leaves[j]);
        g2.push_back(g_leaves[j]);
        g2.push_back(g_leaves[j]);
    }
    const WitnessConfig embedded = make_witness(build_tree(leaves2), f2, g2);
    CHECK(witness_value(embedded) == doctest::Approx(witness_value(config)).epsilon(1e-12));
}

TEST_CASE("size bound sweep: identity trees stay below one") {
    Rng rng(37);
    for (int trial = 0; trial < 200; ++trial) {
        const int depth = 1 + static_cast<int>(rng.below(3));
        const int d = 2;
        const int leaves = 1 << depth;
        WitnessConfig config =
            make_witness(build_tree(std::vector<CMat>(leaves, CMat::Identity(d, d))),
                         random_leaf_vectors(rng, leaves, d),
                         random_leaf_vectors(rng, leaves, d));
        const BellmanPoint p = config.derived_point();
        if (p.X <= 0.0 || p.Y <= 0.0) continue;
        const double ratio = witness_value(config) / std::sqrt(p.X * p.Y);
        CHECK(ratio <= 1.0 + 1e-12);
    }
}

TEST_CASE("size bound sweep produces bounded, finite rows") {
    const std::vector<SizeBoundRow> rows = size_bound_sweep({0.04, 0.16}, 6, 41, Exec::serial);
    REQUIRE(rows.size() == 2);
    for (const SizeBoundRow& row : rows) {
        CHECK(row.band_hit);
        CHECK(std::isfinite(row.max_ratio));
        CHECK(row.max_ratio >= 0.0);
        CHECK(std::abs(row.c_delta) <= 10.0);
        CHECK(row.samples == 6);
    }
    CHECK_THROWS_AS((void)size_bound_sweep({0.7}, 4, 1, Exec::serial), config_error);
}
