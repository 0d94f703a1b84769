#include "mwlab/dyadic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mwlab/errors.hpp"

namespace mwlab {

namespace {

int depth_from_leaf_count(std::size_t count) {
    if (count == 0 || (count & (count - 1)) != 0)
        throw config_error("dyadic: leaf count must be a power of two");
    int depth = 0;
    while ((std::size_t(1) << depth) < count) ++depth;
    return depth;
}

EigenFrame canonical_frame(const CMat& a, double* min_gap) {
    const EigH e = eig_herm(a);
    const int d = static_cast<int>(e.values.size());
    EigenFrame frame;
    frame.values = RVec(d);
    frame.vectors = CMat(d, d);
    // Reorder descending; Eigen returns ascending.
    for (int k = 0; k < d; ++k) {
        frame.values(k) = e.values(d - 1 - k);
        frame.vectors.col(k) = e.vectors.col(d - 1 - k);
    }
    // Phase: largest-modulus entry real positive, ties to the lowest index.
    for (int k = 0; k < d; ++k) {
        int arg = 0;
        double best = -1.0;
        for (int r = 0; r < d; ++r) {
            const double m = std::abs(frame.vectors(r, k));
            if (m > best + 1e-15) {
                best = m;
                arg = r;
            }
        }
        const cplx pivot = frame.vectors(arg, k);
        if (std::abs(pivot) > 0.0) frame.vectors.col(k) *= std::conj(pivot) / std::abs(pivot);
    }
    if (min_gap != nullptr) {
        const double scale = std::max(1.0, std::abs(frame.values(0)));
        for (int k = 0; k + 1 < d; ++k)
            *min_gap = std::min(*min_gap, (frame.values(k) - frame.values(k + 1)) / scale);
    }
    return frame;
}

DyadicWeightTree::Side build_side(const std::vector<CMat>& leaves, int depth, double* min_gap) {
    DyadicWeightTree::Side side;
    const std::int64_t total = tree_nodes(depth);
    const std::int64_t first_leaf = internal_nodes(depth);
    side.averages.resize(total);
    for (std::int64_t j = 0; j < std::int64_t(leaves.size()); ++j)
        side.averages[first_leaf + j] = leaves[j];
    for (std::int64_t node = first_leaf - 1; node >= 0; --node)
        side.averages[node] =
            0.5 * (side.averages[2 * node + 1] + side.averages[2 * node + 2]);
    side.frames.resize(total);
    for (std::int64_t node = 0; node < total; ++node)
        side.frames[node] = canonical_frame(side.averages[node], min_gap);
    return side;
}

}  // namespace

DyadicWeightTree build_tree(const std::vector<CMat>& leaves) {
    const int depth = depth_from_leaf_count(leaves.size());
    if (leaves.empty()) throw config_error("build_tree: empty leaf list");
    const int d = static_cast<int>(leaves.front().rows());
    std::vector<CMat> inv_leaves;
    inv_leaves.reserve(leaves.size());
    for (const CMat& leaf : leaves) {
        if (leaf.rows() != d || leaf.cols() != d)
            throw config_error("build_tree: inconsistent leaf dimensions");
        inv_leaves.push_back(inverse_pd(leaf));
    }
    DyadicWeightTree tree;
    tree.depth = depth;
    tree.d = d;
    tree.leaves = leaves;
    double min_gap = std::numeric_limits<double>::infinity();
    tree.fwd = build_side(leaves, depth, &min_gap);
    tree.inv = build_side(inv_leaves, depth, &min_gap);
    tree.min_eigen_gap = min_gap;
    tree.degenerate = d > 1 && min_gap < 1e-8;
    return tree;
}

double dyadic_a2(const DyadicWeightTree& tree) {
    double best = 1.0 - kTolPsd;
    for (std::int64_t node = 0; node < tree_nodes(tree.depth); ++node) {
        const double v = spectral_norm(sqrt_pd(tree.fwd.averages[node]) *
                                       sqrt_pd(tree.inv.averages[node]));
        best = std::max(best, v);
    }
    return best;
}

HaarExpansion HaarExpansion::analyze(int d, const std::vector<CVec>& leaf_values) {
    const int depth = depth_from_leaf_count(leaf_values.size());
    HaarExpansion e;
    e.depth = depth;
    e.d = d;
    const std::int64_t first_leaf = internal_nodes(depth);
    std::vector<CVec> averages(tree_nodes(depth));
    for (std::int64_t j = 0; j < std::int64_t(leaf_values.size()); ++j) {
        if (leaf_values[j].size() != d)
            throw config_error("HaarExpansion: leaf dimension mismatch");
        averages[first_leaf + j] = leaf_values[j];
    }
    for (std::int64_t node = first_leaf - 1; node >= 0; --node)
        averages[node] = 0.5 * (averages[2 * node + 1] + averages[2 * node + 2]);
    e.mean = averages[0];
    e.coeffs.resize(first_leaf);
    for (std::int64_t node = 0; node < first_leaf; ++node) {
        const double root_measure = std::sqrt(node_measure(node));
        e.coeffs[node] =
            0.5 * root_measure * (averages[2 * node + 2] - averages[2 * node + 1]);
    }
    return e;
}

std::vector<CVec> HaarExpansion::reconstruct() const {
    const std::int64_t first_leaf = internal_nodes(depth);
    std::vector<CVec> averages(tree_nodes(depth));
    averages[0] = mean;
    for (std::int64_t node = 0; node < first_leaf; ++node) {
        const CVec step = coeffs[node] / std::sqrt(node_measure(node));
        averages[2 * node + 1] = averages[node] - step;
        averages[2 * node + 2] = averages[node] + step;
    }
    return std::vector<CVec>(averages.begin() + first_leaf, averages.end());
}

double HaarExpansion::norm2() const {
    double s = mean.squaredNorm();
    for (const CVec& c : coeffs) s += c.squaredNorm();
    return std::sqrt(s);
}

CVec HaarExpansion::delta(std::int64_t node) const {
    return 2.0 / std::sqrt(node_measure(node)) * coeffs[node];
}

DyadicSignPattern DyadicSignPattern::constant(int depth, int d, int sign) {
    if (sign != 1 && sign != -1) throw config_error("DyadicSignPattern: sign must be +-1");
    DyadicSignPattern p;
    p.depth = depth;
    p.d = d;
    p.signs.assign(static_cast<std::size_t>(internal_nodes(depth)) * d,
                   static_cast<std::int8_t>(sign));
    return p;
}

DyadicSignPattern DyadicSignPattern::random(int depth, int d, Rng& rng) {
    DyadicSignPattern p = constant(depth, d, 1);
    for (auto& s : p.signs) s = (rng.next_u64() & 1u) ? 1 : -1;
    return p;
}

HaarExpansion martingale_apply(const DyadicWeightTree& tree, const DyadicSignPattern& sigma,
                               const HaarExpansion& f) {
    if (tree.depth != f.depth || tree.d != f.d || sigma.depth != f.depth || sigma.d != f.d)
        throw config_error("martingale_apply: depth or dimension mismatch");
    HaarExpansion out = f;
    out.mean = CVec::Zero(f.d);
    for (std::int64_t node = 0; node < internal_nodes(f.depth); ++node) {
        const CMat& basis = tree.fwd.frames[node].vectors;
        CVec acc = CVec::Zero(f.d);
        for (int k = 0; k < f.d; ++k) {
            // (c, e_k) with the pairing conjugate-linear in its second slot.
            const cplx coef = basis.col(k).dot(f.coeffs[node]);
            acc += static_cast<double>(sigma.sign(node, k)) * coef * basis.col(k);
        }
        out.coeffs[node] = acc;
    }
    return out;
}

namespace {

Eigen::MatrixXcd assemble_weighted_transform(const DyadicWeightTree& tree,
                                             const DyadicSignPattern& sigma) {
    const std::int64_t leaves = std::int64_t(1) << tree.depth;
    const int d = tree.d;
    const std::int64_t dim = leaves * d;
    std::vector<CMat> w_sqrt(leaves), w_inv_sqrt(leaves);
    for (std::int64_t j = 0; j < leaves; ++j) {
        w_sqrt[j] = sqrt_pd(tree.leaves[j]);
        w_inv_sqrt[j] = sqrt_pd(inverse_pd(tree.leaves[j]));
    }
    Eigen::MatrixXcd a(dim, dim);
    std::vector<CVec> basis_leaf(leaves, CVec::Zero(d));
    for (std::int64_t j = 0; j < leaves; ++j) {
        for (int c = 0; c < d; ++c) {
            for (std::int64_t q = 0; q < leaves; ++q) basis_leaf[q].setZero();
            basis_leaf[j] = w_inv_sqrt[j].col(c);
            const HaarExpansion he = HaarExpansion::analyze(d, basis_leaf);
            const HaarExpansion me = martingale_apply(tree, sigma, he);
            const std::vector<CVec> out = me.reconstruct();
            for (std::int64_t q = 0; q < leaves; ++q) {
                const CVec v = w_sqrt[q] * out[q];
                for (int r = 0; r < d; ++r) a(q * d + r, j * d + c) = v(r);
            }
        }
    }
    return a;
}

}  // namespace

double weighted_norm_exact(const DyadicWeightTree& tree, const DyadicSignPattern& sigma) {
    if (tree.depth > 8 || tree.d > 4)
        throw config_error("weighted_norm_exact: feasibility cap is depth <= 8, d <= 4");
    if (sigma.depth != tree.depth || sigma.d != tree.d)
        throw config_error("weighted_norm_exact: pattern mismatch");
    const Eigen::MatrixXcd a = assemble_weighted_transform(tree, sigma);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(a.adjoint() * a);
    if (solver.info() != Eigen::Success)
        throw numeric_error("weighted_norm_exact: eigendecomposition failed");
    return std::sqrt(std::max(0.0, solver.eigenvalues().maxCoeff()));
}

double dual_bilinear_sum(const DyadicWeightTree& tree, const HaarExpansion& f,
                         const HaarExpansion& g) {
    if (tree.depth != f.depth || f.depth != g.depth || f.d != g.d)
        throw config_error("dual_bilinear_sum: depth mismatch");
    // |(Delta_I f, Delta_I g)| |I| / 4 == |(c_I^f, c_I^g)| in the Haar
    // normalization used here.
    double s = 0.0;
    for (std::int64_t node = 0; node < internal_nodes(f.depth); ++node)
        s += std::abs(g.coeffs[node].dot(f.coeffs[node]));
    return s;
}

SupSigmaResult sup_sigma_norm(const DyadicWeightTree& tree, int budget, std::uint64_t seed,
                              Exec exec) {
    if (budget < 1) throw config_error("sup_sigma_norm: budget must be >= 1");
    const std::int64_t bits = internal_nodes(tree.depth) * tree.d;
    SupSigmaResult result;

    if (bits <= 16) {
        const std::int64_t total = std::int64_t(1) << bits;
        std::vector<double> norms(total, 0.0);
        for_each_index(exec, total, [&](std::int64_t mask) {
            DyadicSignPattern sigma = DyadicSignPattern::constant(tree.depth, tree.d, 1);
            for (std::int64_t b = 0; b < bits; ++b)
                sigma.signs[b] = (mask >> b) & 1 ? -1 : 1;
            norms[mask] = weighted_norm_exact(tree, sigma);
        });
        result.norm = *std::max_element(norms.begin(), norms.end());
        result.exhaustive = true;
        result.evaluated = total;
        return result;
    }

    // Randomized lower bound: any sample is valid, the transform norm is
    // what we maximize. Slots keep the reduction deterministic.
    std::vector<double> norms(budget, 0.0);
    std::vector<DyadicSignPattern> patterns(static_cast<std::size_t>(budget));
    for_each_index(exec, budget, [&](std::int64_t i) {
        Rng rng = Rng::task_stream(seed, static_cast<std::uint64_t>(i));
        patterns[i] = DyadicSignPattern::random(tree.depth, tree.d, rng);
        norms[i] = weighted_norm_exact(tree, patterns[i]);
    });
    std::int64_t best_index = 0;
    for (std::int64_t i = 1; i < budget; ++i)
        if (norms[i] > norms[best_index]) best_index = i;
    double best = norms[best_index];
    DyadicSignPattern current = patterns[best_index];
    std::int64_t evaluated = budget;

    // Greedy single-flip ascent from the best sample.
    bool improved = true;
    int passes = 0;
    while (improved && passes < 4) {
        improved = false;
        ++passes;
        for (std::int64_t b = 0; b < bits; ++b) {
            current.signs[b] = -current.signs[b];
            const double v = weighted_norm_exact(tree, current);
            ++evaluated;
            if (v > best + 1e-14) {
                best = v;
                improved = true;
            } else {
                current.signs[b] = -current.signs[b];
            }
        }
    }
    result.norm = best;
    result.exhaustive = false;
    result.evaluated = evaluated;
    return result;
}

}  // namespace mwlab
