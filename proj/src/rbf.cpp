#include "rigmixer/rbf.hpp"

#include <cmath>
#include <unordered_set>

#include "rigmixer/errors.hpp"

namespace rigmixer {

namespace {

double kernel(double r) {
    return r > 0.0 ? r * r * std::log(r) : 0.0; // thin plate spline
}

// Farthest-point subsampling, seeded at index 0, ties to the lowest index.
// Coincident points (within 1e-12) are never selected twice.
std::vector<int> farthest_point_subsample(const std::vector<Vec3>& pts, int max_samples) {
    const int n = static_cast<int>(pts.size());
    std::vector<int> picked{0};
    std::vector<double> min_d(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) min_d[static_cast<size_t>(i)] = (pts[static_cast<size_t>(i)] - pts[0]).norm();
    while (static_cast<int>(picked.size()) < std::min(n, max_samples)) {
        int best = -1;
        double best_d = 1e-12;
        for (int i = 0; i < n; ++i) {
            if (min_d[static_cast<size_t>(i)] > best_d) {
                best_d = min_d[static_cast<size_t>(i)];
                best = i;
            }
        }
        if (best < 0) break; // everything left is a duplicate
        picked.push_back(best);
        for (int i = 0; i < n; ++i) {
            min_d[static_cast<size_t>(i)] =
                std::min(min_d[static_cast<size_t>(i)], (pts[static_cast<size_t>(i)] - pts[static_cast<size_t>(best)]).norm());
        }
    }
    return picked;
}

} // namespace

RbfInterpolator build_rbf(const std::vector<Vec3>& from_points,
                          const std::vector<Vec3>& to_points, int max_samples) {
    if (from_points.size() != to_points.size()) {
        throw SingularSystem("point lists differ in length");
    }
    if (from_points.empty()) {
        throw SingularSystem("no sample points");
    }
    const std::vector<int> picked = farthest_point_subsample(from_points, max_samples);
    const int n = static_cast<int>(picked.size());
    if (n < 4) {
        throw SingularSystem("need at least 4 distinct samples for the degree-1 tail");
    }

    RbfInterpolator rbf;
    rbf.points.reserve(static_cast<size_t>(n));
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n + 4, 3);
    for (int i = 0; i < n; ++i) {
        const size_t src = static_cast<size_t>(picked[static_cast<size_t>(i)]);
        rbf.points.push_back(from_points[src]);
        rhs.row(i) = (to_points[src] - from_points[src]).transpose();
    }

    // Saddle system [K P; P^T 0] [w; c] = [values; 0].
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n + 4, n + 4);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double k = kernel((rbf.points[static_cast<size_t>(i)] - rbf.points[static_cast<size_t>(j)]).norm());
            A(i, j) = k;
            A(j, i) = k;
        }
        A(i, n + 0) = 1.0;
        A(i, n + 1) = rbf.points[static_cast<size_t>(i)].x();
        A(i, n + 2) = rbf.points[static_cast<size_t>(i)].y();
        A(i, n + 3) = rbf.points[static_cast<size_t>(i)].z();
        A(n + 0, i) = 1.0;
        A(n + 1, i) = rbf.points[static_cast<size_t>(i)].x();
        A(n + 2, i) = rbf.points[static_cast<size_t>(i)].y();
        A(n + 3, i) = rbf.points[static_cast<size_t>(i)].z();
    }

    rbf.coeffs = A.partialPivLu().solve(rhs);

    const double scale = std::max(1.0, rhs.cwiseAbs().maxCoeff());
    const double residual = (A * rbf.coeffs - rhs).cwiseAbs().maxCoeff();
    if (!rbf.coeffs.allFinite() || residual > 1e-8 * scale) {
        throw SingularSystem("interpolation system is singular (coplanar or duplicate samples)");
    }
    return rbf;
}

Vec3 advect_query(const Vec3& p, const RbfInterpolator& rbf) {
    const int n = static_cast<int>(rbf.points.size());
    Eigen::RowVector3d disp = Eigen::RowVector3d::Zero();
    for (int i = 0; i < n; ++i) {
        const double k = kernel((p - rbf.points[static_cast<size_t>(i)]).norm());
        if (k != 0.0) disp += k * rbf.coeffs.row(i);
    }
    disp += rbf.coeffs.row(n);
    disp += p.x() * rbf.coeffs.row(n + 1);
    disp += p.y() * rbf.coeffs.row(n + 2);
    disp += p.z() * rbf.coeffs.row(n + 3);
    return p + disp.transpose();
}

} // namespace rigmixer
