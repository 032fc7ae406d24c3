#include "rigmixer/sdf.hpp"

#include <algorithm>
#include <cmath>

namespace rigmixer {

double sample_sdf(const SdfGrid& grid, const Vec3& p) {
    // Values live at voxel centers; the node box spans the centers.
    const Vec3 lo = grid.origin;
    const Vec3 hi = grid.origin + grid.spacing * Vec3(grid.dims[0] - 1, grid.dims[1] - 1, grid.dims[2] - 1);
    const Vec3 q = p.cwiseMax(lo).cwiseMin(hi);
    const double outside = (p - q).norm();

    const Vec3 u = (q - lo) / grid.spacing;
    int i0 = std::clamp(static_cast<int>(std::floor(u.x())), 0, grid.dims[0] - 2);
    int j0 = std::clamp(static_cast<int>(std::floor(u.y())), 0, grid.dims[1] - 2);
    int k0 = std::clamp(static_cast<int>(std::floor(u.z())), 0, grid.dims[2] - 2);
    const double fx = u.x() - i0;
    const double fy = u.y() - j0;
    const double fz = u.z() - k0;

    auto at = [&](int di, int dj, int dk) {
        return grid.values[grid.index(i0 + di, j0 + dj, k0 + dk)];
    };
    const double c00 = at(0, 0, 0) * (1 - fx) + at(1, 0, 0) * fx;
    const double c10 = at(0, 1, 0) * (1 - fx) + at(1, 1, 0) * fx;
    const double c01 = at(0, 0, 1) * (1 - fx) + at(1, 0, 1) * fx;
    const double c11 = at(0, 1, 1) * (1 - fx) + at(1, 1, 1) * fx;
    const double c0 = c00 * (1 - fy) + c10 * fy;
    const double c1 = c01 * (1 - fy) + c11 * fy;
    return c0 * (1 - fz) + c1 * fz + outside;
}

Vec3 bbox_map(const Vec3& p, const BoundingBox& from_box, const BoundingBox& to_box) {
    if (from_box.degenerate()) {
        throw DegenerateBox("from-box has a zero extent");
    }
    const Vec3 n = (p - from_box.center).cwiseQuotient(from_box.half_extents);
    return to_box.center + n.cwiseProduct(to_box.half_extents);
}

double union_sdf(std::span<const double> values) {
    if (values.empty()) {
        throw EmptyList("union of no SDF values");
    }
    return *std::min_element(values.begin(), values.end());
}

} // namespace rigmixer
