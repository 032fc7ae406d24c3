#include "rigmixer/field.hpp"

#include <algorithm>
#include <cmath>

namespace rigmixer {

namespace {

// Compacted triangle-set mesh plus the original vertex ids it uses.
struct PartMesh {
    Mesh mesh;
    std::vector<int> vertex_ids;
};

PartMesh extract_part_mesh(const Mesh& mesh, const std::vector<std::array<int, 3>>& tris) {
    PartMesh part;
    std::vector<int> remap(mesh.vertices.size(), -1);
    for (const auto& t : tris) {
        std::array<int, 3> nt{};
        for (int c = 0; c < 3; ++c) {
            const int v = t[static_cast<size_t>(c)];
            if (remap[static_cast<size_t>(v)] < 0) {
                remap[static_cast<size_t>(v)] = static_cast<int>(part.mesh.vertices.size());
                part.mesh.vertices.push_back(mesh.vertices[static_cast<size_t>(v)]);
                part.vertex_ids.push_back(v);
            }
            nt[static_cast<size_t>(c)] = remap[static_cast<size_t>(v)];
        }
        part.mesh.triangles.push_back(nt);
    }
    return part;
}

// bbox_map with per-axis guards: a collapsed axis maps to the target
// center instead of dividing by zero (virtual boxes shrink to a point).
Vec3 guarded_bbox_map(const Vec3& p, const BoundingBox& from, const BoundingBox& to) {
    if (from.center == to.center && from.half_extents == to.half_extents) {
        return p; // identity mapping, bit-exact at the t endpoints
    }
    Vec3 out;
    for (int a = 0; a < 3; ++a) {
        const double h = from.half_extents[a];
        const double n = h > 1e-15 ? (p[a] - from.center[a]) / h : 0.0;
        out[a] = to.center[a] + n * to.half_extents[a];
    }
    return out;
}

// Sub-box of a split bone for the given cumulative fraction range,
// expressed in the segment's own coordinates (origin at the segment head).
void sub_box_of(const Bone& bone, const std::pair<double, double>& range,
                BoundingBox& box, double& y_offset) {
    const double ylo = bone.part_box.center.y() - bone.part_box.half_extents.y();
    const double span = 2.0 * bone.part_box.half_extents.y();
    const double y0 = ylo + range.first * span;
    const double y1 = ylo + range.second * span;
    y_offset = range.first * bone.length;
    box.center = Vec3(bone.part_box.center.x(), 0.5 * (y0 + y1) - y_offset, bone.part_box.center.z());
    box.half_extents = Vec3(bone.part_box.half_extents.x(), 0.5 * (y1 - y0), bone.part_box.half_extents.z());
}

enum class SideResult { Value, NoGrid };

SideResult side_value(const Vec3& p_world, const UnifiedBone& k, bool source_side,
                      const InterpContext& ctx, double& value) {
    const Skeleton& skel = source_side ? *ctx.src_skel : *ctx.tgt_skel;
    const PartGrids& grids = source_side ? *ctx.src_grids : *ctx.tgt_grids;
    const int ref = source_side ? *k.source_ref : *k.target_ref;
    const auto git = grids.find(ref);
    if (git == grids.end()) return SideResult::NoGrid;
    const Bone& bone = skel.bone(ref);

    BoundingBox side_box = bone.part_box;
    double y_offset = 0.0;
    if (k.kind == UnifiedKind::Loose && k.split_range) {
        const CorrespondencePair& pair = ctx.uni->provenance[static_cast<size_t>(k.pair_index)];
        const bool split_is_source = pair.kind == PairKind::OneToManyTarget;
        if (split_is_source == source_side) {
            sub_box_of(bone, *k.split_range, side_box, y_offset);
        }
    }

    const Vec3 q_k = k.frame.to_local(p_world);
    Vec3 q = guarded_bbox_map(q_k, k.box, side_box);
    q.y() += y_offset; // segment coords -> bone-local grid coords
    if (source_side && ctx.src_rbfs) {
        const auto rit = ctx.src_rbfs->find(ref);
        if (rit != ctx.src_rbfs->end()) q = advect_query(q, rit->second);
    } else if (!source_side && ctx.tgt_rbfs) {
        const auto rit = ctx.tgt_rbfs->find(ref);
        if (rit != ctx.tgt_rbfs->end()) q = advect_query(q, rit->second);
    }
    value = sample_sdf(git->second, q);
    return SideResult::Value;
}

double bone_value(const Vec3& p_world, const UnifiedBone& k, const InterpContext& ctx,
                  bool lenient) {
    const double t = k.t;
    if (k.kind == UnifiedKind::Virtual) {
        const bool source_side = k.source_ref.has_value();
        const double w = source_side ? 1.0 - t : t;
        if (w <= 0.0) return kSdfSentinel; // fully vanished endpoint
        double v = 0.0;
        if (side_value(p_world, k, source_side, ctx, v) == SideResult::NoGrid) {
            if (!lenient) throw MissingGrid("no SDF grid for bone referenced by '" + k.name + "'");
            return kSdfSentinel;
        }
        return w * v;
    }

    double vs = 0.0, vt = 0.0;
    bool have_s = false, have_t = false;
    if (1.0 - t > 0.0) {
        if (side_value(p_world, k, true, ctx, vs) == SideResult::Value) {
            have_s = true;
        } else if (!lenient) {
            throw MissingGrid("no source SDF grid for unified bone '" + k.name + "'");
        }
    } else {
        have_s = true; // weight zero, value irrelevant
    }
    if (t > 0.0) {
        if (side_value(p_world, k, false, ctx, vt) == SideResult::Value) {
            have_t = true;
        } else if (!lenient) {
            throw MissingGrid("no target SDF grid for unified bone '" + k.name + "'");
        }
    } else {
        have_t = true;
    }
    if (!have_s && !have_t) return kSdfSentinel;
    // A geometry-less side contributes zero, like the void side of a
    // virtual bone.
    return (1.0 - t) * vs + t * vt;
}

} // namespace

double interp_sdf_value(const Vec3& p_world, const UnifiedBone& k, const InterpContext& ctx) {
    return bone_value(p_world, k, ctx, false);
}

double field_value(const Vec3& p_world, const InterpContext& ctx) {
    double best = kSdfSentinel;
    for (const UnifiedBone& k : ctx.uni->bones) {
        best = std::min(best, bone_value(p_world, k, ctx, true));
    }
    return best;
}

Aabb field_region(const UnifiedSkeleton& uni) {
    Aabb region;
    for (const UnifiedBone& k : uni.bones) {
        for (int c = 0; c < 8; ++c) {
            const Vec3 corner(
                k.box.center.x() + ((c & 1) ? k.box.half_extents.x() : -k.box.half_extents.x()),
                k.box.center.y() + ((c & 2) ? k.box.half_extents.y() : -k.box.half_extents.y()),
                k.box.center.z() + ((c & 4) ? k.box.half_extents.z() : -k.box.half_extents.z()));
            region.expand(k.frame.to_world(corner));
        }
    }
    region.inflate(0.10);
    return region;
}

PartGrids build_part_sdfs(const Character& character, const Skeleton& frames,
                          const Mesh& current_mesh, int resolution, Exec exec) {
    const std::vector<int> assignment = segment_mesh(character);
    const auto part_tris =
        split_part_triangles(current_mesh, assignment, character.skeleton.size());

    PartGrids grids;
    for (int b = 0; b < character.skeleton.size(); ++b) {
        const auto& tris = part_tris[static_cast<size_t>(b)];
        if (tris.empty()) continue;
        const PartMesh part = extract_part_mesh(current_mesh, tris);
        const LocalFrame& frame = frames.bone(b).frame;
        const BoundingBox box = part_bounding_box(part.mesh.vertices, frame);
        if ((box.half_extents.array() <= 0.0).all()) continue;
        const VoxelGrid vox = voxelize_part(part.mesh, box, frame, resolution, exec);
        grids.emplace(b, signed_distance_transform(vox, exec));
    }
    return grids;
}

InterpolationField::InterpolationField(const Character& src, const Character& tgt,
                                       const std::vector<CorrespondencePair>& pairs,
                                       const Pose& pose, double t, const Config& config) {
    advect_ = config.mode == QueryMode::Advect;
    const BoundingBox src_box = character_box(src.mesh, src.skeleton);
    const BoundingBox tgt_box = character_box(tgt.mesh, tgt.skeleton);

    SkeletonPose src_pose, tgt_pose;
    if (!pose.empty()) {
        // Pose transfer only needs the pair topology; any t works.
        const UnifiedSkeleton topo =
            build_unified_skeleton(src.skeleton, tgt.skeleton, pairs, t, src_box, tgt_box);
        std::tie(src_pose, tgt_pose) = transfer_pose(topo, pose);
    }
    src_posed_ = pose_skeleton(src.skeleton, src_pose);
    tgt_posed_ = pose_skeleton(tgt.skeleton, tgt_pose);
    const Mesh src_mesh = apply_skinning(src, src_pose);
    const Mesh tgt_mesh = apply_skinning(tgt, tgt_pose);

    if (!advect_) {
        src_grids_owned_ = build_part_sdfs(src, src_posed_, src_mesh, config.resolution, config.exec);
        tgt_grids_owned_ = build_part_sdfs(tgt, tgt_posed_, tgt_mesh, config.resolution, config.exec);
        src_grids_ = &src_grids_owned_;
        tgt_grids_ = &tgt_grids_owned_;
    } else {
        if (config.rest_src_grids != nullptr) {
            src_grids_ = config.rest_src_grids;
        } else {
            src_grids_owned_ =
                build_part_sdfs(src, src.skeleton, src.mesh, config.resolution, config.exec);
            src_grids_ = &src_grids_owned_;
        }
        if (config.rest_tgt_grids != nullptr) {
            tgt_grids_ = config.rest_tgt_grids;
        } else {
            tgt_grids_owned_ =
                build_part_sdfs(tgt, tgt.skeleton, tgt.mesh, config.resolution, config.exec);
            tgt_grids_ = &tgt_grids_owned_;
        }

        // Per-part advection: posed-local anchor points carrying the
        // displacement back to rest-local positions.
        auto fit_side = [&](const Character& character, const Skeleton& posed,
                            const Mesh& posed_mesh, PartRbfs& out) {
            const std::vector<int> assignment = segment_mesh(character);
            const auto part_tris = split_part_triangles(character.mesh, assignment,
                                                        character.skeleton.size());
            for (int b = 0; b < character.skeleton.size(); ++b) {
                const auto& tris = part_tris[static_cast<size_t>(b)];
                if (tris.empty()) continue;
                const PartMesh part = extract_part_mesh(character.mesh, tris);
                std::vector<Vec3> posed_local, rest_local;
                posed_local.reserve(part.vertex_ids.size());
                rest_local.reserve(part.vertex_ids.size());
                const LocalFrame& rest_frame = character.skeleton.bone(b).frame;
                const LocalFrame& posed_frame = posed.bone(b).frame;
                for (int v : part.vertex_ids) {
                    posed_local.push_back(posed_frame.to_local(posed_mesh.vertices[static_cast<size_t>(v)]));
                    rest_local.push_back(rest_frame.to_local(character.mesh.vertices[static_cast<size_t>(v)]));
                }
                try {
                    out.emplace(b, build_rbf(posed_local, rest_local, 1000));
                } catch (const SingularSystem&) {
                    // Too few or degenerate samples (flat or tiny part):
                    // fall back to identity advection for this part.
                }
            }
        };
        fit_side(src, src_posed_, src_mesh, src_rbfs_);
        fit_side(tgt, tgt_posed_, tgt_mesh, tgt_rbfs_);
    }

    uni_ = build_unified_skeleton(src_posed_, tgt_posed_, pairs, t, src_box, tgt_box);
}

double InterpolationField::value(const Vec3& p_world) const {
    InterpContext ctx;
    ctx.uni = &uni_;
    ctx.src_skel = &src_posed_;
    ctx.tgt_skel = &tgt_posed_;
    ctx.src_grids = src_grids_;
    ctx.tgt_grids = tgt_grids_;
    if (advect_) {
        ctx.src_rbfs = &src_rbfs_;
        ctx.tgt_rbfs = &tgt_rbfs_;
    }
    return field_value(p_world, ctx);
}

Mesh InterpolationField::extract(int resolution, Exec exec) const {
    return extract_surface([this](const Vec3& p) { return value(p); }, region(), resolution, exec);
}

} // namespace rigmixer
