#include "rigmixer/pose.hpp"

#include <cmath>

namespace rigmixer {

Mat3 euler_xyz_deg(const Vec3& angles_deg) {
    const Vec3 r = angles_deg * (M_PI / 180.0);
    return (Eigen::AngleAxisd(r.x(), Vec3::UnitX()) *
            Eigen::AngleAxisd(r.y(), Vec3::UnitY()) *
            Eigen::AngleAxisd(r.z(), Vec3::UnitZ()))
        .toRotationMatrix();
}

std::pair<SkeletonPose, SkeletonPose> transfer_pose(const UnifiedSkeleton& uni, const Pose& pose) {
    SkeletonPose src_pose, tgt_pose;

    auto angles_of = [&pose](int id) -> Vec3 {
        const auto it = pose.find(id);
        return it == pose.end() ? Vec3::Zero() : it->second.euler_deg;
    };
    auto is_rest = [&pose](int id) {
        const auto it = pose.find(id);
        return it == pose.end() || it->second.euler_deg.isZero(0.0);
    };

    // Loose groups need the componentwise mean of their members' angles for
    // the split side; collect them per provenance pair.
    std::map<int, std::vector<const UnifiedBone*>> loose_groups;
    for (const UnifiedBone& k : uni.bones) {
        if (k.kind == UnifiedKind::Loose) loose_groups[k.pair_index].push_back(&k);
    }

    for (const UnifiedBone& k : uni.bones) {
        if (k.kind == UnifiedKind::Loose) continue;
        if (is_rest(k.id)) continue;
        const Mat3 rot = euler_xyz_deg(angles_of(k.id));
        if (k.kind == UnifiedKind::Constrained) {
            src_pose.rotations[*k.source_ref] = rot;
            tgt_pose.rotations[*k.target_ref] = rot;
        } else { // Virtual: only the referenced side moves
            if (k.source_ref) src_pose.rotations[*k.source_ref] = rot;
            if (k.target_ref) tgt_pose.rotations[*k.target_ref] = rot;
        }
    }

    for (const auto& [pair_index, group] : loose_groups) {
        const CorrespondencePair& p = uni.provenance[static_cast<size_t>(pair_index)];
        const bool many_on_source = p.kind == PairKind::OneToManySource;
        bool all_rest = true;
        Vec3 mean = Vec3::Zero();
        for (const UnifiedBone* k : group) {
            all_rest = all_rest && is_rest(k->id);
            mean += angles_of(k->id);
            // Each chain-side bone follows its own segment.
            if (is_rest(k->id)) continue;
            const Mat3 rot = euler_xyz_deg(angles_of(k->id));
            if (many_on_source) {
                src_pose.rotations[*k->source_ref] = rot;
            } else {
                tgt_pose.rotations[*k->target_ref] = rot;
            }
        }
        if (all_rest) continue;
        mean /= static_cast<double>(group.size());
        const Mat3 rot = euler_xyz_deg(mean);
        if (many_on_source) {
            tgt_pose.rotations[p.target_bones[0]] = rot;
        } else {
            src_pose.rotations[p.source_bones[0]] = rot;
        }
    }
    return {std::move(src_pose), std::move(tgt_pose)};
}

std::vector<BoneDelta> pose_deltas(const Skeleton& skeleton, const SkeletonPose& pose) {
    std::vector<BoneDelta> deltas(skeleton.bones.size());
    // Parents precede children in BFS order.
    std::vector<int> order{skeleton.root};
    for (size_t i = 0; i < order.size(); ++i) {
        for (int c : skeleton.children[static_cast<size_t>(order[i])]) order.push_back(c);
    }
    for (int id : order) {
        const Bone& b = skeleton.bone(id);
        BoneDelta local; // rotation about the bone head, in the bone frame
        const auto it = pose.rotations.find(id);
        if (it != pose.rotations.end() && !it->second.isIdentity(0.0)) {
            local.rotation = b.frame.rotation * it->second * b.frame.rotation.transpose();
            local.translation = b.head - local.rotation * b.head;
            local.trivial = false;
        }
        const BoneDelta* parent = b.parent >= 0 ? &deltas[static_cast<size_t>(b.parent)] : nullptr;
        BoneDelta& out = deltas[static_cast<size_t>(id)];
        if (parent == nullptr || parent->trivial) {
            out = local;
        } else if (local.trivial) {
            out = *parent;
        } else {
            out.rotation = parent->rotation * local.rotation;
            out.translation = parent->rotation * local.translation + parent->translation;
            out.trivial = false;
        }
    }
    return deltas;
}

Mesh apply_skinning(const Character& character, const SkeletonPose& pose) {
    const std::vector<BoneDelta> deltas = pose_deltas(character.skeleton, pose);
    Mesh out;
    out.triangles = character.mesh.triangles;
    out.vertices.resize(character.mesh.vertices.size());
    const size_t n = character.mesh.vertices.size();
#pragma omp parallel for schedule(static)
    for (long long vi = 0; vi < static_cast<long long>(n); ++vi) {
        const Vec3& v = character.mesh.vertices[static_cast<size_t>(vi)];
        // Delta form: untouched bones contribute nothing, so the rest pose
        // is exact even when weights only sum to 1 within tolerance.
        Vec3 moved = v;
        for (const auto& [bone, w] : character.weights[static_cast<size_t>(vi)]) {
            const BoneDelta& d = deltas[static_cast<size_t>(bone)];
            if (d.trivial) continue;
            moved += w * (d.apply(v) - v);
        }
        out.vertices[static_cast<size_t>(vi)] = moved;
    }
    return out;
}

Skeleton pose_skeleton(const Skeleton& skeleton, const SkeletonPose& pose) {
    const std::vector<BoneDelta> deltas = pose_deltas(skeleton, pose);
    Skeleton out = skeleton;
    for (Bone& b : out.bones) {
        const BoneDelta& d = deltas[static_cast<size_t>(b.id)];
        if (d.trivial) continue;
        b.head = d.apply(b.head);
        b.frame.rotation = d.rotation * b.frame.rotation;
        b.frame.origin = b.head;
    }
    return out;
}

} // namespace rigmixer
