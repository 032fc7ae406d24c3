#pragma once

#include <Eigen/Dense>

namespace rigmixer {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Quat = Eigen::Quaterniond;

// Sentinel magnitude for SDF grids with no inside/outside boundary
// (all-empty reads +kSdfSentinel everywhere, all-occupied reads -kSdfSentinel).
// Kept finite so min-union stays total.
inline constexpr double kSdfSentinel = 1e9;

// World-space axis-aligned box (min/max corners).
struct Aabb {
    Vec3 min = Vec3::Constant(std::numeric_limits<double>::max());
    Vec3 max = Vec3::Constant(std::numeric_limits<double>::lowest());

    void expand(const Vec3& p) {
        min = min.cwiseMin(p);
        max = max.cwiseMax(p);
    }
    void expand(const Aabb& other) {
        min = min.cwiseMin(other.min);
        max = max.cwiseMax(other.max);
    }
    bool valid() const { return (min.array() <= max.array()).all(); }
    Vec3 center() const { return 0.5 * (min + max); }
    Vec3 extents() const { return max - min; }
    void inflate(double factor) {
        const Vec3 c = center();
        const Vec3 h = 0.5 * extents() * (1.0 + factor);
        min = c - h;
        max = c + h;
    }
};

} // namespace rigmixer
