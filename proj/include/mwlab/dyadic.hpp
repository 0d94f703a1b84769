#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "mwlab/exec.hpp"
#include "mwlab/matlin.hpp"
#include "mwlab/rng.hpp"

namespace mwlab {

/// Dyadic tree of depth N over [0,1). Nodes are stored in heap order:
/// node 0 is the root, node i has children 2i+1 (left half) and 2i+2
/// (right half); level l starts at index 2^l - 1. Leaves sit at level N,
/// internal nodes are the indices [0, 2^N - 1). |I| = 2^{-level}.
inline std::int64_t tree_nodes(int depth) { return (std::int64_t(2) << depth) - 1; }
inline std::int64_t internal_nodes(int depth) { return (std::int64_t(1) << depth) - 1; }
inline int node_level(std::int64_t node) {
    int level = 0;
    while (node >= (std::int64_t(2) << level) - 1) ++level;
    return level;
}
inline double node_measure(std::int64_t node) { return std::pow(0.5, node_level(node)); }

/// Orthonormal eigenbasis of a node average: eigenvalues descending, each
/// vector's largest-modulus entry made real positive (ties to the lowest
/// index) so repeated builds are deterministic.
struct EigenFrame {
    RVec values;
    CMat vectors;  // columns
};

struct DyadicWeightTree {
    int depth = 0;
    int d = 1;
    std::vector<CMat> leaves;
    struct Side {
        std::vector<CMat> averages;     // all nodes, heap order
        std::vector<EigenFrame> frames; // aligned with averages
    };
    Side fwd;  // built from the leaves
    Side inv;  // built from the leaf inverses
    double min_eigen_gap = 0.0;  // smallest spectral gap seen across frames
    bool degenerate = false;     // some gap fell below 1e-8
};

/// Bottom-up averages, eigenframes, and the inverse-side structure.
/// Leaf count must be a power of two; every leaf must be HermPD.
DyadicWeightTree build_tree(const std::vector<CMat>& leaves);

/// sup over nodes of || <W>_I^{1/2} <W^{-1}>_I^{1/2} ||; always >= 1 - kTolPsd.
double dyadic_a2(const DyadicWeightTree& tree);

/// Expansion of a C^d-valued step function on 2^N leaves in the Haar basis
/// h_I = (chi_{I+} - chi_{I-}) / sqrt|I| (right half positive). The
/// coefficient c_I = (f, h_I) relates to the average jump by
/// Delta_I f = <f>_{I+} - <f>_{I-} = 2 c_I / sqrt|I| (pinned by a unit test).
struct HaarExpansion {
    int depth = 0;
    int d = 1;
    CVec mean;
    std::vector<CVec> coeffs;  // internal nodes, heap order

    static HaarExpansion analyze(int d, const std::vector<CVec>& leaf_values);
    std::vector<CVec> reconstruct() const;
    std::int64_t leaf_count() const { return std::int64_t(1) << depth; }
    /// L2([0,1)) norm: sqrt(|mean|^2 + sum |c_I|^2) by Parseval.
    double norm2() const;
    /// Average jump Delta_I f at an internal node.
    CVec delta(std::int64_t node) const;
};

/// One sign per (internal node, eigen index).
struct DyadicSignPattern {
    int depth = 0;
    int d = 1;
    std::vector<std::int8_t> signs;  // node * d + k

    static DyadicSignPattern constant(int depth, int d, int sign = 1);
    static DyadicSignPattern random(int depth, int d, Rng& rng);
    int sign(std::int64_t node, int k) const { return signs[node * d + k]; }
    std::int64_t bits() const { return internal_nodes(depth) * d; }
};

/// Martingale transform: expands each Haar coefficient in the node's
/// eigenframe, multiplies frame coefficients by their signs, re-expands.
/// The mean component is annihilated.
HaarExpansion martingale_apply(const DyadicWeightTree& tree, const DyadicSignPattern& sigma,
                               const HaarExpansion& f);

/// Exact ||M_sigma^W||_{L2(W)} on the finite tree: dense assembly of
/// W^{1/2} M W^{-1/2} on the d * 2^N leaf space and its spectral norm.
/// Feasibility cap: depth <= 8 and d <= 4.
double weighted_norm_exact(const DyadicWeightTree& tree, const DyadicSignPattern& sigma);

/// (1 / (4|J|)) sum over internal I of |(Delta_I f, Delta_I g)| |I| with
/// J = [0,1) — the sup over sign patterns of the dualized martingale pairing.
double dual_bilinear_sum(const DyadicWeightTree& tree, const HaarExpansion& f,
                         const HaarExpansion& g);

struct SupSigmaResult {
    double norm = 0.0;
    bool exhaustive = false;
    std::int64_t evaluated = 0;
};

/// sup over sign patterns of the exact weighted norm: exhaustive when the
/// pattern space has at most 2^16 elements, otherwise `budget` random
/// patterns plus a greedy single-flip ascent from the best one.
SupSigmaResult sup_sigma_norm(const DyadicWeightTree& tree, int budget,
                              std::uint64_t seed = 1, Exec exec = Exec::par);

}  // namespace mwlab
