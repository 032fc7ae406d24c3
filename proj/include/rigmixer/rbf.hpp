#pragma once

// Scattered displacement interpolation: per-axis thin-plate-spline RBF with
// a degree-1 polynomial tail, fitted on a farthest-point subsample.

#include <vector>

#include "rigmixer/types.hpp"

namespace rigmixer {

struct RbfInterpolator {
    std::vector<Vec3> points;    // retained sample points
    Eigen::MatrixXd coeffs;      // (n + 4) x 3: kernel weights then 1,x,y,z tail
};

// Fits the displacement field to_points - from_points, anchored at
// from_points (at most max_samples of them, farthest-point subsampled).
// Exact at retained samples to 1e-8; the linear tail reproduces constant
// fields exactly. Throws SingularSystem for under-determined or degenerate
// sample sets.
RbfInterpolator build_rbf(const std::vector<Vec3>& from_points,
                          const std::vector<Vec3>& to_points, int max_samples);

// p plus the interpolated displacement at p.
Vec3 advect_query(const Vec3& p, const RbfInterpolator& rbf);

} // namespace rigmixer
