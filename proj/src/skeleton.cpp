#include "rigmixer/skeleton.hpp"

#include <algorithm>
#include <cmath>

namespace rigmixer {

LocalFrame compute_local_frame(const Vec3& head, const Vec3& tail) {
    const Vec3 d = tail - head;
    const double len = d.norm();
    if (len <= 1e-9) {
        throw DegenerateBone("bone head and tail coincide");
    }
    const Vec3 y = d / len;

    LocalFrame frame;
    frame.origin = head;

    const double dot = y.y(); // canonical +Y . y
    if (dot < -1.0 + 1e-12) {
        // Antipodal case: pick the 180 degree rotation about +X.
        frame.rotation = Eigen::AngleAxisd(M_PI, Vec3::UnitX()).toRotationMatrix();
        return frame;
    }
    // Shortest-arc rotation taking +Y to y. Quat (w, xyz) = (1 + dot, +Y x y)
    // normalizes to the half-angle rotation about the common perpendicular.
    const Vec3 axis = Vec3::UnitY().cross(y);
    Quat q(1.0 + dot, axis.x(), axis.y(), axis.z());
    q.normalize();
    frame.rotation = q.toRotationMatrix();
    return frame;
}

Skeleton build_skeleton(const std::vector<BoneSpec>& specs) {
    if (specs.empty()) {
        throw ValidationError("skeleton has no bones");
    }
    Skeleton skel;
    skel.bones.resize(specs.size());
    skel.children.assign(specs.size(), {});

    const int n = static_cast<int>(specs.size());
    for (int i = 0; i < n; ++i) {
        const BoneSpec& s = specs[static_cast<size_t>(i)];
        Bone& b = skel.bones[static_cast<size_t>(i)];
        b.id = i;
        b.name = s.name;
        b.parent = s.parent;
        b.head = s.head;
        const double len = (s.tail - s.head).norm();
        if (len <= 1e-9) {
            throw ValidationError("bone '" + s.name + "': zero length");
        }
        b.length = len;
        b.frame = compute_local_frame(s.head, s.tail);

        if (s.parent < 0) {
            if (skel.root >= 0) {
                throw ValidationError("multiple roots: '" +
                                      skel.bone(skel.root).name + "' and '" + s.name + "'");
            }
            skel.root = i;
        } else {
            if (s.parent >= n) {
                throw ValidationError("bone '" + s.name + "': parent index out of range");
            }
            skel.children[static_cast<size_t>(s.parent)].push_back(i);
        }
    }
    if (skel.root < 0) {
        throw ValidationError("skeleton has no root");
    }

    // Levels via BFS from the root; also proves all bones are reachable
    // (parent links that form a cycle leave bones unvisited).
    std::vector<int> order{skel.root};
    skel.bones[static_cast<size_t>(skel.root)].hierarchy_level = 0;
    for (size_t i = 0; i < order.size(); ++i) {
        const int b = order[i];
        for (int c : skel.children[static_cast<size_t>(b)]) {
            skel.bone(c).hierarchy_level = skel.bone(b).hierarchy_level + 1;
            order.push_back(c);
        }
    }
    if (static_cast<int>(order.size()) != n) {
        throw ValidationError("skeleton parent links do not form a tree");
    }
    return skel;
}

int octant(const Vec3& point, const LocalFrame& root_frame) {
    const Vec3 q = root_frame.to_local(point);
    return (q.x() >= 0.0 ? 1 : 0) | (q.y() >= 0.0 ? 2 : 0) | (q.z() >= 0.0 ? 4 : 0);
}

std::vector<int> segment_mesh(const Character& character) {
    std::vector<int> assignment(character.mesh.vertices.size(), -1);
    for (size_t v = 0; v < character.weights.size(); ++v) {
        const VertexWeights& w = character.weights[v];
        if (w.empty()) {
            throw EmptyWeights("vertex " + std::to_string(v) + " has no skinning weights");
        }
        int best = w.front().first;
        double best_w = w.front().second;
        for (const auto& [bone, weight] : w) {
            if (weight > best_w) { // ties keep the lowest id (weights sorted by id)
                best = bone;
                best_w = weight;
            }
        }
        assignment[v] = best;
    }
    return assignment;
}

BoundingBox part_bounding_box(std::span<const Vec3> part_vertices, const LocalFrame& frame) {
    if (part_vertices.empty()) {
        throw EmptyPart("part has no vertices");
    }
    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::max());
    Vec3 hi = Vec3::Constant(std::numeric_limits<double>::lowest());
    for (const Vec3& v : part_vertices) {
        const Vec3 q = frame.to_local(v);
        lo = lo.cwiseMin(q);
        hi = hi.cwiseMax(q);
    }
    BoundingBox box;
    box.center = 0.5 * (lo + hi);
    box.half_extents = 0.5 * (hi - lo);
    return box;
}

void compute_part_boxes(Character& character) {
    const std::vector<int> assignment = segment_mesh(character);
    std::vector<std::vector<Vec3>> parts(character.skeleton.bones.size());
    for (size_t v = 0; v < assignment.size(); ++v) {
        parts[static_cast<size_t>(assignment[v])].push_back(character.mesh.vertices[v]);
    }
    for (Bone& b : character.skeleton.bones) {
        const auto& verts = parts[static_cast<size_t>(b.id)];
        if (verts.empty()) {
            b.part_box = BoundingBox{};
        } else {
            b.part_box = part_bounding_box(verts, b.frame);
        }
    }
}

std::vector<std::vector<std::array<int, 3>>>
split_part_triangles(const Mesh& mesh, const std::vector<int>& vertex_bone, int bone_count) {
    std::vector<std::vector<std::array<int, 3>>> parts(static_cast<size_t>(bone_count));
    for (const auto& tri : mesh.triangles) {
        const int a = vertex_bone[static_cast<size_t>(tri[0])];
        const int b = vertex_bone[static_cast<size_t>(tri[1])];
        const int c = vertex_bone[static_cast<size_t>(tri[2])];
        int owner;
        if (a == b || a == c) {
            owner = a;
        } else if (b == c) {
            owner = b;
        } else {
            owner = std::min({a, b, c});
        }
        parts[static_cast<size_t>(owner)].push_back(tri);
    }
    return parts;
}

} // namespace rigmixer
