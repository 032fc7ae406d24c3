#include "rigmixer/unify.hpp"

#include <algorithm>
#include <cmath>

namespace rigmixer {

BoundingBox lerp_box(const BoundingBox& a, const BoundingBox& b, double t) {
    // Corners are paired by sign octant, so the corner lerp reduces to
    // lerping centers and half extents.
    BoundingBox out;
    out.center = a.center + t * (b.center - a.center);
    out.half_extents = a.half_extents + t * (b.half_extents - a.half_extents);
    return out;
}

LocalFrame slerp_frame(const LocalFrame& a, const LocalFrame& b, double t) {
    // Exact endpoints: the quaternion round trip would smudge the last ulp.
    if (t == 0.0) return a;
    if (t == 1.0) return b;
    Quat qa(a.rotation);
    Quat qb(b.rotation);
    LocalFrame out;
    out.rotation = qa.slerp(t, qb).toRotationMatrix(); // shortest path
    out.origin = a.origin + t * (b.origin - a.origin);
    return out;
}

std::vector<SplitSegment> split_bone(const Bone& one_side, std::span<const double> many_lengths) {
    std::vector<SplitSegment> segments;
    if (many_lengths.empty()) return segments;

    double total = 0.0;
    for (double l : many_lengths) total += l;

    const Vec3 axis = one_side.frame.y_axis();
    const Vec3 box_lo = one_side.part_box.min();
    const Vec3 box_hi = one_side.part_box.max();
    const double box_span = box_hi.y() - box_lo.y();

    double prefix = 0.0;
    double cum_prev = 0.0;
    for (size_t i = 0; i < many_lengths.size(); ++i) {
        prefix += many_lengths[i];
        const double cum = (i + 1 == many_lengths.size()) ? 1.0 : prefix / total;

        SplitSegment seg;
        seg.fraction_range = {cum_prev, cum};
        seg.y_offset = cum_prev * one_side.length;
        seg.head = one_side.head + seg.y_offset * axis;
        seg.length = (cum - cum_prev) * one_side.length;

        const double y0 = box_lo.y() + cum_prev * box_span;
        const double y1 = box_lo.y() + cum * box_span;
        seg.box.center = Vec3(one_side.part_box.center.x(), 0.5 * (y0 + y1),
                              one_side.part_box.center.z());
        seg.box.half_extents = Vec3(one_side.part_box.half_extents.x(), 0.5 * (y1 - y0),
                                    one_side.part_box.half_extents.z());
        segments.push_back(seg);
        cum_prev = cum;
    }
    return segments;
}

Vec3 map_point_between_character_boxes(const Vec3& p,
                                       const BoundingBox& from_box, const LocalFrame& from_frame,
                                       const BoundingBox& to_box, const LocalFrame& to_frame) {
    if (from_box.degenerate()) {
        throw DegenerateBox("from-box has a zero extent");
    }
    const Vec3 q = from_frame.to_local(p);
    const Vec3 n = (q - from_box.center).cwiseQuotient(from_box.half_extents);
    const Vec3 out_local = to_box.center + n.cwiseProduct(to_box.half_extents);
    return to_frame.to_world(out_local);
}

BoundingBox character_box(const Mesh& mesh, const Skeleton& skeleton) {
    const LocalFrame& root = skeleton.root_frame();
    BoundingBox box; // center pinned to the root head (local origin)
    for (const Vec3& v : mesh.vertices) {
        const Vec3 q = root.to_local(v);
        box.half_extents = box.half_extents.cwiseMax(q.cwiseAbs());
    }
    return box;
}

namespace {

BoundingBox shifted_along_y(const BoundingBox& box, double y_shift) {
    BoundingBox out = box;
    out.center.y() += y_shift;
    return out;
}

struct Builder {
    const Skeleton& src;
    const Skeleton& tgt;
    double t;
    const BoundingBox& src_char_box;
    const BoundingBox& tgt_char_box;

    UnifiedSkeleton uni;
    std::vector<int> owner_src, owner_tgt; // bone id -> unified id for parenting
    std::vector<int> first_segment_parent_hint; // unified id -> -2 (resolve) or explicit id

    static Vec3 lerp(const Vec3& a, const Vec3& b, double t) { return a + t * (b - a); }
    static double lerp(double a, double b, double t) { return a + t * (b - a); }

    int add_bone(UnifiedBone b) {
        b.id = static_cast<int>(uni.bones.size());
        uni.bones.push_back(std::move(b));
        return uni.bones.back().id;
    }

    void constrained(const CorrespondencePair& p, int pair_index) {
        const Bone& s = src.bone(p.source_bones[0]);
        const Bone& d = tgt.bone(p.target_bones[0]);
        UnifiedBone k;
        k.name = s.name + "__" + d.name;
        k.kind = UnifiedKind::Constrained;
        k.source_ref = s.id;
        k.target_ref = d.id;
        k.t = t;
        k.pair_index = pair_index;
        k.head = lerp(s.head, d.head, t);
        k.length = lerp(s.length, d.length, t);
        k.frame = slerp_frame(s.frame, d.frame, t);
        k.frame.origin = k.head;
        k.box = lerp_box(s.part_box, d.part_box, t);
        const int id = add_bone(std::move(k));
        owner_src[static_cast<size_t>(s.id)] = id;
        owner_tgt[static_cast<size_t>(d.id)] = id;
    }

    void loose_group(const CorrespondencePair& p, int pair_index) {
        const bool many_on_source = p.kind == PairKind::OneToManySource;
        // The single bone on the other side gets split proportionally to the
        // chain's bone lengths.
        const Skeleton& many_skel = many_on_source ? src : tgt;
        const std::vector<int>& chain = many_on_source ? p.source_bones : p.target_bones;
        const Bone& one = many_on_source ? tgt.bone(p.target_bones[0]) : src.bone(p.source_bones[0]);

        std::vector<double> lengths;
        lengths.reserve(chain.size());
        for (int b : chain) lengths.push_back(many_skel.bone(b).length);
        const std::vector<SplitSegment> segs = split_bone(one, lengths);

        int prev = -1;
        for (size_t i = 0; i < chain.size(); ++i) {
            const Bone& m = many_skel.bone(chain[i]);
            const SplitSegment& seg = segs[i];
            const BoundingBox seg_box = shifted_along_y(seg.box, -seg.y_offset);

            UnifiedBone k;
            k.kind = UnifiedKind::Loose;
            k.t = t;
            k.pair_index = pair_index;
            k.split_range = seg.fraction_range;
            const std::string seg_tag = "#" + std::to_string(i);
            // Segment frames keep the split bone's orientation.
            LocalFrame seg_frame = one.frame;
            seg_frame.origin = seg.head;
            if (many_on_source) {
                k.name = m.name + "__" + one.name + seg_tag;
                k.source_ref = m.id;
                k.target_ref = one.id;
                k.head = lerp(m.head, seg.head, t);
                k.length = lerp(m.length, seg.length, t);
                k.frame = slerp_frame(m.frame, seg_frame, t);
                k.box = lerp_box(m.part_box, seg_box, t);
            } else {
                k.name = one.name + seg_tag + "__" + m.name;
                k.source_ref = one.id;
                k.target_ref = m.id;
                k.head = lerp(seg.head, m.head, t);
                k.length = lerp(seg.length, m.length, t);
                k.frame = slerp_frame(seg_frame, m.frame, t);
                k.box = lerp_box(seg_box, m.part_box, t);
            }
            k.frame.origin = k.head;
            const int id = add_bone(std::move(k));
            if (i > 0) {
                uni.bones[static_cast<size_t>(id)].parent = prev;
                first_segment_parent_hint[static_cast<size_t>(id)] = prev;
            }
            if (many_on_source) {
                owner_src[static_cast<size_t>(m.id)] = id;
            } else {
                owner_tgt[static_cast<size_t>(m.id)] = id;
            }
            prev = id;
        }
        // Children hanging off the split bone attach below its last segment.
        if (many_on_source) {
            owner_tgt[static_cast<size_t>(one.id)] = prev;
        } else {
            owner_src[static_cast<size_t>(one.id)] = prev;
        }
    }

    void virtual_bone(const CorrespondencePair& p, int pair_index) {
        const bool source_side = p.kind == PairKind::OneToVoidSource;
        const Skeleton& own_skel = source_side ? src : tgt;
        const Skeleton& other_skel = source_side ? tgt : src;
        const BoundingBox& own_box = source_side ? src_char_box : tgt_char_box;
        const BoundingBox& other_box = source_side ? tgt_char_box : src_char_box;
        const Bone& b = own_skel.bone(source_side ? p.source_bones[0] : p.target_bones[0]);

        // Synthesize the missing endpoint by mapping head and tail through
        // the character-level boxes.
        const Vec3 mapped_head = map_point_between_character_boxes(
            b.head, own_box, own_skel.root_frame(), other_box, other_skel.root_frame());
        const Vec3 mapped_tail = map_point_between_character_boxes(
            b.tail(), own_box, own_skel.root_frame(), other_box, other_skel.root_frame());
        LocalFrame mapped_frame;
        if ((mapped_tail - mapped_head).norm() > 1e-9) {
            mapped_frame = compute_local_frame(mapped_head, mapped_tail);
        } else {
            mapped_frame = b.frame; // degenerate mapping keeps the real frame
            mapped_frame.origin = mapped_head;
        }

        const BoundingBox empty_box{}; // all extents zero
        UnifiedBone k;
        k.kind = UnifiedKind::Virtual;
        k.t = t;
        k.pair_index = pair_index;
        if (source_side) {
            k.name = b.name + "__void";
            k.source_ref = b.id;
            k.head = lerp(b.head, mapped_head, t);
            k.length = lerp(b.length, 0.0, t);
            k.box = lerp_box(b.part_box, empty_box, t);
            k.frame = slerp_frame(b.frame, mapped_frame, t);
        } else {
            k.name = "void__" + b.name;
            k.target_ref = b.id;
            k.head = lerp(mapped_head, b.head, t);
            k.length = lerp(0.0, b.length, t);
            k.box = lerp_box(empty_box, b.part_box, t);
            k.frame = slerp_frame(mapped_frame, b.frame, t);
        }
        k.frame.origin = k.head;
        const int id = add_bone(std::move(k));
        if (source_side) {
            owner_src[static_cast<size_t>(b.id)] = id;
        } else {
            owner_tgt[static_cast<size_t>(b.id)] = id;
        }
    }

    void resolve_parents() {
        for (UnifiedBone& k : uni.bones) {
            if (first_segment_parent_hint[static_cast<size_t>(k.id)] >= 0) {
                continue; // chained loose segment, already parented
            }
            int parent = -1;
            if (k.source_ref) {
                const int sp = src.bone(*k.source_ref).parent;
                if (sp >= 0) {
                    parent = owner_src[static_cast<size_t>(sp)];
                    if (parent < 0) {
                        throw BrokenParent("no unified bone references source bone '" +
                                           src.bone(sp).name + "'");
                    }
                }
            }
            if (parent < 0 && k.target_ref) {
                const int tp = tgt.bone(*k.target_ref).parent;
                if (tp >= 0) {
                    parent = owner_tgt[static_cast<size_t>(tp)];
                    if (parent < 0) {
                        throw BrokenParent("no unified bone references target bone '" +
                                           tgt.bone(tp).name + "'");
                    }
                }
            }
            k.parent = parent;
            if (parent < 0) {
                if (uni.root >= 0 && uni.root != k.id) {
                    throw BrokenParent("pairs produce more than one unified root");
                }
                uni.root = k.id;
            }
        }
        if (uni.root < 0) {
            throw BrokenParent("pairs produce no unified root");
        }
    }
};

} // namespace

UnifiedSkeleton build_unified_skeleton(const Skeleton& src, const Skeleton& tgt,
                                       const std::vector<CorrespondencePair>& pairs, double t,
                                       const BoundingBox& src_char_box,
                                       const BoundingBox& tgt_char_box) {
    // Coverage first: an uncovered bone is the caller forgetting pairs, not
    // a malformed pair file.
    {
        std::vector<int> ss(src.bones.size(), 0), tt(tgt.bones.size(), 0);
        for (const auto& p : pairs) {
            for (int b : p.source_bones)
                if (b >= 0 && b < src.size()) ss[static_cast<size_t>(b)] += 1;
            for (int b : p.target_bones)
                if (b >= 0 && b < tgt.size()) tt[static_cast<size_t>(b)] += 1;
        }
        for (int b = 0; b < src.size(); ++b) {
            if (ss[static_cast<size_t>(b)] == 0) {
                throw IncompletePairs("source bone '" + src.bone(b).name + "' is not covered");
            }
        }
        for (int b = 0; b < tgt.size(); ++b) {
            if (tt[static_cast<size_t>(b)] == 0) {
                throw IncompletePairs("target bone '" + tgt.bone(b).name + "' is not covered");
            }
        }
    }
    validate_pairs(pairs, src, tgt);

    Builder builder{src, tgt, t, src_char_box, tgt_char_box, {}, {}, {}, {}};
    builder.uni.t = t;
    builder.uni.provenance = pairs;
    builder.owner_src.assign(src.bones.size(), -1);
    builder.owner_tgt.assign(tgt.bones.size(), -1);
    // Generous upper bound: one unified bone per referenced bone.
    builder.first_segment_parent_hint.assign(src.bones.size() + tgt.bones.size(), -1);

    for (size_t pi = 0; pi < pairs.size(); ++pi) {
        const auto& p = pairs[pi];
        switch (p.kind) {
        case PairKind::OneToOne: builder.constrained(p, static_cast<int>(pi)); break;
        case PairKind::OneToManySource:
        case PairKind::OneToManyTarget: builder.loose_group(p, static_cast<int>(pi)); break;
        case PairKind::OneToVoidSource:
        case PairKind::OneToVoidTarget: builder.virtual_bone(p, static_cast<int>(pi)); break;
        }
    }
    builder.resolve_parents();
    return builder.uni;
}

UnifiedSkeleton build_unified_skeleton(const Character& src, const Character& tgt,
                                       const std::vector<CorrespondencePair>& pairs, double t) {
    return build_unified_skeleton(src.skeleton, tgt.skeleton, pairs, t,
                                  character_box(src.mesh, src.skeleton),
                                  character_box(tgt.mesh, tgt.skeleton));
}

} // namespace rigmixer
