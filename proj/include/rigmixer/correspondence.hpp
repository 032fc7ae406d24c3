#pragma once

// Hierarchical bone correspondence between two skeletons: recursive
// five-case cost model, Hungarian assignment with per-entity void slots,
// and post-processing of 1-to-void runs into 1-to-many chains.

#include <string>
#include <vector>

#include "rigmixer/skeleton.hpp"

namespace rigmixer {

enum class PairKind {
    OneToOne,
    OneToVoidSource, // a source bone matched to nothing
    OneToVoidTarget, // a target bone matched to nothing
    OneToManySource, // a chain of >=2 source bones matched to one target bone
    OneToManyTarget, // one source bone matched to a chain of >=2 target bones
};

struct CorrespondencePair {
    PairKind kind = PairKind::OneToOne;
    std::vector<int> source_bones; // ordered root-to-tip for chains
    std::vector<int> target_bones;
};

// Void-pressure predictor coefficients; fitted constants, overridable.
struct AlphaParams {
    double c1 = -0.05;
    double c2 = 0.15;
    double c3 = 1.5;
};

// Dense cost matrix with an individually priced void slot per row and per
// column. Unmatched rows/columns pay their void cost.
struct CostMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> entries; // row-major, rows*cols
    std::vector<double> void_row_cost;
    std::vector<double> void_col_cost;

    double& at(int r, int c) { return entries[static_cast<size_t>(r) * cols + c]; }
    double at(int r, int c) const { return entries[static_cast<size_t>(r) * cols + c]; }
};

struct Assignment {
    std::vector<int> row_to_col; // -1 = void
    std::vector<int> col_to_row; // -1 = void
    double total = 0.0;
};

// Minimum-cost assignment where every row takes one column or its void slot
// and every unmatched column pays its void cost. Among equal-cost optima the
// lexicographically smallest assignment by (row, col) is returned.
Assignment hungarian(const CostMatrix& costs);

// alpha(S, D) = c1*min(|S|,|D|) + c2*||S|-|D|| + c3, clamped below at zero.
double compute_alpha(int n_source, int n_target, const AlphaParams& params);

// |l_s - l_d| + ||h_s - h_d|| + |level_s - level_d| + [octant mismatch].
double leaf_leaf_cost(const Bone& s, const Bone& d,
                      const LocalFrame& src_root_frame, const LocalFrame& tgt_root_frame);

// alpha * bone length: the price of deforming a bone to nothing.
double leaf_void_cost(const Bone& bone, double alpha);

// 1 - cos of the angle between the bone-head -> root-head directions of the
// two bones; similar directions cost little. A bone head sitting exactly on
// its root head contributes zero.
double branch_direction_cost(const Bone& s, const Bone& d,
                             const Vec3& src_root_head, const Vec3& tgt_root_head);

struct MatchResult {
    std::vector<CorrespondencePair> pairs; // OneToOne and OneToVoid kinds only
    double total_cost = 0.0;
};

// Recursive optimal matching of the two bone trees. Roots pair with each
// other; matched children of matched parents are assigned by the Hungarian
// step with per-child void slots priced at the subtree void cost.
MatchResult hierarchical_match(const Skeleton& src, const Skeleton& tgt,
                               const AlphaParams& params);

// Groups 1-to-void runs hanging under 1-to-1 matched parents into
// 1-to-many (and extra 1-to-1) pairs; bones stay covered exactly once.
std::vector<CorrespondencePair> post_process(const std::vector<CorrespondencePair>& pairs,
                                             const Skeleton& src, const Skeleton& tgt);

// Checks kind invariants, chain connectivity of many-sides, and that every
// bone of both skeletons is covered exactly once. Throws ValidationError.
void validate_pairs(const std::vector<CorrespondencePair>& pairs,
                    const Skeleton& src, const Skeleton& tgt);

} // namespace rigmixer
