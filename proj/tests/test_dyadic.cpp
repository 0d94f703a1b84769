#include <cmath>

#include "doctest.h"
#include "mwlab/dyadic.hpp"
#include "mwlab/weight_field.hpp"
#include "oracles.hpp"

using namespace mwlab;

namespace {

CMat scalar1(double v) {
    CMat m(1, 1);
    m(0, 0) = v;
    return m;
}

std::vector<CMat> random_pd_leaves(Rng& rng, int count, int d, double strength = 0.4) {
    std::vector<CMat> leaves;
    for (int i = 0; i < count; ++i) {
        CMat h(d, d);
        for (int c = 0; c < d; ++c)
            for (int r = 0; r < d; ++r) h(r, c) = strength * rng.normal_complex();
        leaves.push_back(exp_herm(hermitize(h)));
    }
    return leaves;
}

std::vector<CVec> random_leaf_vectors(Rng& rng, int count, int d) {
    std::vector<CVec> v(count);
    for (int i = 0; i < count; ++i) {
        v[i] = CVec(d);
        for (int c = 0; c < d; ++c) v[i](c) = rng.normal_complex();
    }
    return v;
}

}  // namespace

TEST_CASE("tree construction and node indexing") {
    CHECK(tree_nodes(3) == 15);
    CHECK(internal_nodes(3) == 7);
    CHECK(node_level(0) == 0);
    CHECK(node_level(2) == 1);
    CHECK(node_level(6) == 2);
    CHECK(node_measure(3) == doctest::Approx(0.25));
    CHECK_THROWS_AS((void)build_tree(std::vector<CMat>(3, CMat::Identity(1, 1))), config_error);

    // Identity leaves: every frame diagonalizes the average trivially.
    const DyadicWeightTree tree = build_tree(std::vector<CMat>(8, CMat::Identity(2, 2)));
    for (std::int64_t node = 0; node < tree_nodes(tree.depth); ++node) {
        const EigenFrame& frame = tree.fwd.frames[node];
        CHECK((frame.vectors.adjoint() * frame.vectors - CMat::Identity(2, 2)).norm() < 1e-13);
        const CMat reconstructed =
            frame.vectors * frame.values.asDiagonal() * frame.vectors.adjoint();
        CHECK((reconstructed - tree.fwd.averages[node]).norm() < 1e-13);
    }
}

TEST_CASE("frames diagonalize and are deterministic") {
    Rng rng(1);
    const std::vector<CMat> leaves = random_pd_leaves(rng, 16, 3);
    const DyadicWeightTree a = build_tree(leaves);
    const DyadicWeightTree b = build_tree(leaves);
    for (std::int64_t node = 0; node < tree_nodes(a.depth); ++node) {
        CHECK((a.fwd.frames[node].vectors - b.fwd.frames[node].vectors).norm() == 0.0);
        const EigenFrame& frame = a.fwd.frames[node];
        for (int k = 0; k + 1 < 3; ++k) CHECK(frame.values(k) >= frame.values(k + 1));
        const CMat reconstructed =
            frame.vectors * frame.values.asDiagonal() * frame.vectors.adjoint();
        CHECK((reconstructed - a.fwd.averages[node]).norm() <= kTolLin * 10.0);
    }
}

TEST_CASE("dyadic_a2 hand-computed cases") {
    // Constant tree: characteristic exactly 1 for any scalar multiple.
    const DyadicWeightTree constant = build_tree(std::vector<CMat>(8, scalar1(3.7)));
    CHECK(dyadic_a2(constant) == doctest::Approx(1.0).epsilon(1e-12));

    // Two scalar leaves 1 +- eps: root value 1/sqrt(1 - eps^2).
    const double eps = 0.6;
    const DyadicWeightTree pair = build_tree({scalar1(1.0 + eps), scalar1(1.0 - eps)});
    CHECK(dyadic_a2(pair) == doctest::Approx(1.25).epsilon(1e-12));

    // Always at least 1.
    Rng rng(2);
    for (int trial = 0; trial < 20; ++trial) {
        const DyadicWeightTree tree = build_tree(random_pd_leaves(rng, 8, 2));
        CHECK(dyadic_a2(tree) >= 1.0 - kTolPsd);
    }
}

TEST_CASE("Haar coefficient convention is pinned") {
    // Leaves (-v, +v) on [0,1): f = c h_J with c = v, and Delta_J f = 2v.
    CVec v(2);
    v(0) = cplx(0.3, -0.2);
    v(1) = cplx(1.0, 0.5);
    const HaarExpansion e = HaarExpansion::analyze(2, {CVec(-v), CVec(v)});
    CHECK(e.mean.norm() < 1e-15);
    CHECK((e.coeffs[0] - v).norm() < 1e-15);
    CHECK((e.delta(0) - 2.0 * v).norm() < 1e-15);

    // Reconstruction: h_J is negative on the left half.
    const std::vector<CVec> leaves = e.reconstruct();
    CHECK((leaves[0] + v).norm() < 1e-15);
    CHECK((leaves[1] - v).norm() < 1e-15);
}

TEST_CASE("Haar analyze/reconstruct round trip and Parseval") {
    Rng rng(3);
    const std::vector<CVec> leaves = random_leaf_vectors(rng, 16, 3);
    const HaarExpansion e = HaarExpansion::analyze(3, leaves);
    const std::vector<CVec> back = e.reconstruct();
    for (int j = 0; j < 16; ++j) CHECK((back[j] - leaves[j]).norm() <= kTolLin);

    double direct = 0.0;
    for (const CVec& leaf : leaves) direct += leaf.squaredNorm();
    direct = std::sqrt(direct / 16.0);  // leaf measure 2^-N
    CHECK(e.norm2() == doctest::Approx(direct).epsilon(kTolLin));
}

TEST_CASE("martingale transform basics") {
    Rng rng(4);
    const DyadicWeightTree tree = build_tree(random_pd_leaves(rng, 16, 2));
    std::vector<CVec> leaf_values = random_leaf_vectors(rng, 16, 2);
    HaarExpansion f = HaarExpansion::analyze(2, leaf_values);
    f.mean.setZero();

    // All +1 signs: identity on mean-zero expansions.
    const DyadicSignPattern plus = DyadicSignPattern::constant(4, 2, 1);
    const HaarExpansion same = martingale_apply(tree, plus, f);
    for (std::int64_t node = 0; node < internal_nodes(4); ++node)
        CHECK((same.coeffs[node] - f.coeffs[node]).norm() <= kTolLin);

    // Applying the same signs twice is the identity (involution).
    DyadicSignPattern sigma = DyadicSignPattern::random(4, 2, rng);
    const HaarExpansion twice = martingale_apply(tree, sigma, martingale_apply(tree, sigma, f));
    for (std::int64_t node = 0; node < internal_nodes(4); ++node)
        CHECK((twice.coeffs[node] - f.coeffs[node]).norm() <= kTolLin);

    // On the identity tree any sign pattern is an L2 isometry (Parseval).
    const DyadicWeightTree id_tree = build_tree(std::vector<CMat>(16, CMat::Identity(2, 2)));
    const HaarExpansion flipped = martingale_apply(id_tree, sigma, f);
    CHECK(flipped.norm2() == doctest::Approx(f.norm2()).epsilon(kTolLin));
}

TEST_CASE("exact weighted norm: identity tree and scalar oracle") {
    Rng rng(5);
    // Identity tree: norm 1 for any signs (mean annihilated, Haar part unitary).
    const DyadicWeightTree id_tree = build_tree(std::vector<CMat>(8, CMat::Identity(2, 2)));
    for (int trial = 0; trial < 5; ++trial) {
        const DyadicSignPattern sigma = DyadicSignPattern::random(3, 2, rng);
        CHECK(weighted_norm_exact(id_tree, sigma) == doctest::Approx(1.0).epsilon(1e-12));
    }

    // Scalar weights: compare with the independent double-arithmetic oracle.
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> leaf_weights(8);
        for (double& w : leaf_weights) w = std::exp(0.8 * rng.normal());
        std::vector<CMat> leaves;
        for (double w : leaf_weights) leaves.push_back(scalar1(w));
        const DyadicWeightTree tree = build_tree(leaves);
        DyadicSignPattern sigma = DyadicSignPattern::constant(3, 1, 1);
        std::vector<int> signs(internal_nodes(3));
        for (std::size_t i = 0; i < signs.size(); ++i) {
            signs[i] = (rng.next_u64() & 1) ? 1 : -1;
            sigma.signs[i] = static_cast<std::int8_t>(signs[i]);
        }
        const double value = weighted_norm_exact(tree, sigma);
        const double oracle = oracles::scalar_martingale_weighted_norm(leaf_weights, signs);
        CHECK(value == doctest::Approx(oracle).epsilon(1e-10));
    }
}

TEST_CASE("exact weighted norm: two-leaf exhaustive against hand assembly") {
    Rng rng(6);
    const int d = 2;
    const std::vector<CMat> leaves = random_pd_leaves(rng, 2, d);
    const DyadicWeightTree tree = build_tree(leaves);

    // Hand assembly: on two leaves the transform is
    //   M f = sum_k sigma_k (c, e_k) e_k h_J with c = (f_1 - f_0)/2,
    // i.e. leaf images (-u, +u) with u = sum_k sigma_k (c, e_k) e_k.
    const CMat& basis = tree.fwd.frames[0].vectors;
    double best_direct = 0.0, best_exact = 0.0;
    for (int mask = 0; mask < 4; ++mask) {
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2 * d, 2 * d);
        for (int leaf = 0; leaf < 2; ++leaf) {
            for (int c = 0; c < d; ++c) {
                CVec unit = CVec::Zero(d);
                unit(c) = 1.0;
                const double jump = leaf == 0 ? -0.5 : 0.5;  // (f1 - f0)/2 per basis leaf
                CVec u = CVec::Zero(d);
                for (int k = 0; k < d; ++k) {
                    const double sign = (mask >> k) & 1 ? -1.0 : 1.0;
                    u += sign * jump * basis.col(k).dot(unit) * basis.col(k);
                }
                for (int r = 0; r < d; ++r) {
                    m(r, leaf * d + c) = -u(r);
                    m(d + r, leaf * d + c) = u(r);
                }
            }
        }
        Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(2 * d, 2 * d);
        const CMat w0 = sqrt_pd(leaves[0]);
        const CMat w1 = sqrt_pd(leaves[1]);
        const CMat w0i = sqrt_pd(inverse_pd(leaves[0]));
        const CMat w1i = sqrt_pd(inverse_pd(leaves[1]));
        s.topLeftCorner(d, d) = w0;
        s.bottomRightCorner(d, d) = w1;
        Eigen::MatrixXcd si = Eigen::MatrixXcd::Zero(2 * d, 2 * d);
        si.topLeftCorner(d, d) = w0i;
        si.bottomRightCorner(d, d) = w1i;
        const Eigen::MatrixXcd similar = s * m * si;
        std::vector<cplx> flat(similar.size());
        for (int c = 0; c < similar.cols(); ++c)
            for (int r = 0; r < similar.rows(); ++r) flat[c * similar.rows() + r] = similar(r, c);
        const double direct = oracles::jacobi_spectral_norm(2 * d, 2 * d, flat);

        DyadicSignPattern sigma = DyadicSignPattern::constant(1, d, 1);
        for (int k = 0; k < d; ++k)
            sigma.signs[k] = static_cast<std::int8_t>((mask >> k) & 1 ? -1 : 1);
        const double exact = weighted_norm_exact(tree, sigma);
        CHECK(exact == doctest::Approx(direct).epsilon(1e-10));
        best_direct = std::max(best_direct, direct);
        best_exact = std::max(best_exact, exact);
    }
    const SupSigmaResult sup = sup_sigma_norm(tree, 4, 1, Exec::serial);
    CHECK(sup.exhaustive);
    CHECK(sup.norm == doctest::Approx(best_direct).epsilon(1e-10));
    CHECK(best_exact == doctest::Approx(best_direct).epsilon(1e-10));
}

TEST_CASE("dual bilinear sum: trivial and single-node cases") {
    Rng rng(7);
    const DyadicWeightTree tree = build_tree(random_pd_leaves(rng, 8, 2));

    // Constant g kills every jump.
    std::vector<CVec> const_leaves(8, CVec::Ones(2));
    const HaarExpansion g_const = HaarExpansion::analyze(2, const_leaves);
    const HaarExpansion f = HaarExpansion::analyze(2, random_leaf_vectors(rng, 8, 2));
    CHECK(dual_bilinear_sum(tree, f, g_const) == 0.0);

    // Single root Haar function: value |v|^2, consistent with ||f||^2.
    CVec v(2);
    v(0) = cplx(0.7, 0.1);
    v(1) = cplx(-0.3, 0.9);
    std::vector<CVec> haar_leaves(8);
    for (int j = 0; j < 8; ++j) haar_leaves[j] = (j < 4 ? -1.0 : 1.0) * v;
    const HaarExpansion h = HaarExpansion::analyze(2, haar_leaves);
    const DyadicWeightTree id_tree = build_tree(std::vector<CMat>(8, CMat::Identity(2, 2)));
    CHECK(dual_bilinear_sum(id_tree, h, h) == doctest::Approx(v.squaredNorm()).epsilon(1e-14));
    CHECK(h.norm2() * h.norm2() == doctest::Approx(v.squaredNorm()).epsilon(1e-14));

    // Triangle inequality against the signed sum.
    const HaarExpansion g = HaarExpansion::analyze(2, random_leaf_vectors(rng, 8, 2));
    double signed_sum = 0.0;
    for (std::int64_t node = 0; node < internal_nodes(3); ++node)
        signed_sum += std::real(g.coeffs[node].dot(f.coeffs[node]));
    CHECK(dual_bilinear_sum(tree, f, g) >= std::abs(signed_sum) - 1e-13);
}

TEST_CASE("frame collapse: eigenbasis sums dominate the pairing node-wise") {
    Rng rng(8);
    const DyadicWeightTree tree = build_tree(random_pd_leaves(rng, 16, 3));
    const HaarExpansion f = HaarExpansion::analyze(3, random_leaf_vectors(rng, 16, 3));
    const HaarExpansion g = HaarExpansion::analyze(3, random_leaf_vectors(rng, 16, 3));
    for (std::int64_t node = 0; node < internal_nodes(4); ++node) {
        const CMat& basis = tree.fwd.frames[node].vectors;
        const CVec df = f.delta(node);
        const CVec dg = g.delta(node);
        double framewise = 0.0;
        for (int k = 0; k < 3; ++k)
            framewise += std::abs(basis.col(k).dot(df)) * std::abs(basis.col(k).dot(dg));
        const double paired = std::abs(dg.dot(df));
        CHECK(framewise >= paired - 1e-12);
    }
}

TEST_CASE("sup over signs: identity tree, small exhaustive spaces") {
    const DyadicWeightTree id_tree = build_tree(std::vector<CMat>(4, CMat::Identity(1, 1)));
    const SupSigmaResult sup_id = sup_sigma_norm(id_tree, 16, 3, Exec::serial);
    CHECK(sup_id.norm == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sup_id.exhaustive);

    const DyadicWeightTree two = build_tree({scalar1(1.5), scalar1(0.5)});
    const SupSigmaResult sup_two = sup_sigma_norm(two, 1, 3, Exec::serial);
    CHECK(sup_two.exhaustive);
    CHECK(sup_two.evaluated == 2);
}

TEST_CASE("sup over signs: randomized search is consistent with exhaustive truth") {
    // Depth 4, d = 2 has 2^30 patterns; the randomized+greedy path applies.
    const GridSpec grid{1, 16, 1.0};
    for (double eps : {0.1, 0.3}) {
        const WeightField w =
            make_family(WeightFamily::rotated_diagonal, {eps, 0.7}, grid, 2, 0, Exec::serial);
        const std::vector<CMat> leaves = dyadic_leaves_from_field(w);
        const DyadicWeightTree deep = build_tree(leaves);
        const SupSigmaResult randomized = sup_sigma_norm(deep, 48, 5, Exec::serial);
        CHECK_FALSE(randomized.exhaustive);

        const DyadicWeightTree shallow = build_tree(coarsen_leaves(leaves, 4));
        const SupSigmaResult exhaustive = sup_sigma_norm(shallow, 1, 5, Exec::serial);
        CHECK(exhaustive.exhaustive);

        // The deep randomized sup and the shallow exhaustive sup measure the
        // same family at different depths; both normalized excesses stay
        // comparable and bounded.
        const double deep_ratio =
            (randomized.norm - 1.0) / std::sqrt(dyadic_a2(deep) - 1.0);
        const double shallow_ratio =
            (exhaustive.norm - 1.0) / std::sqrt(dyadic_a2(shallow) - 1.0);
        CHECK(deep_ratio <= 10.0);
        CHECK(shallow_ratio <= 10.0);
        CHECK(std::abs(deep_ratio - shallow_ratio) <=
              0.5 * std::max(deep_ratio, shallow_ratio) + 0.1);
    }
}

TEST_CASE("weighted_norm_exact enforces the feasibility cap") {
    const DyadicWeightTree tree = build_tree(std::vector<CMat>(4, CMat::Identity(5, 5)));
    const DyadicSignPattern sigma = DyadicSignPattern::constant(2, 5, 1);
    CHECK_THROWS_AS((void)weighted_norm_exact(tree, sigma), config_error);
}
