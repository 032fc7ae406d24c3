#include "rigmixer/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace rigmixer {

using Json = nlohmann::ordered_json;

namespace {

Json parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError(path + ": cannot open file");
    }
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
}

void require_version(const Json& j, const std::string& path) {
    if (!j.contains("format_version") || !j["format_version"].is_number_integer() ||
        j["format_version"].get<int>() != 1) {
        throw ParseError(path + ": missing or unsupported format_version (expected 1)");
    }
}

Vec3 parse_vec3(const Json& j, const std::string& what) {
    if (!j.is_array() || j.size() != 3 || !j[0].is_number() || !j[1].is_number() || !j[2].is_number()) {
        throw ParseError(what + ": expected [x, y, z]");
    }
    return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

Json vec3_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

// Everything stated in a character file, before derivation.
struct RawCharacter {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<BoneSpec> bones;
    std::vector<VertexWeights> weights;
};

RawCharacter parse_character(const std::string& path) {
    const Json j = parse_file(path);
    require_version(j, path);
    if (!j.contains("mesh") || !j.contains("skeleton") || !j.contains("weights")) {
        throw ParseError(path + ": expected mesh, skeleton and weights sections");
    }

    RawCharacter raw;
    const Json& mesh = j["mesh"];
    if (!mesh.contains("vertices") || !mesh["vertices"].is_array() ||
        !mesh.contains("triangles") || !mesh["triangles"].is_array()) {
        throw ParseError(path + ": mesh needs vertices and triangles arrays");
    }
    size_t idx = 0;
    for (const Json& v : mesh["vertices"]) {
        raw.vertices.push_back(parse_vec3(v, path + ": mesh.vertices[" + std::to_string(idx++) + "]"));
    }
    idx = 0;
    for (const Json& t : mesh["triangles"]) {
        if (!t.is_array() || t.size() != 3) {
            throw ParseError(path + ": mesh.triangles[" + std::to_string(idx) + "]: expected [i, j, k]");
        }
        std::array<int, 3> tri{};
        for (int c = 0; c < 3; ++c) {
            if (!t[static_cast<size_t>(c)].is_number_integer()) {
                throw ParseError(path + ": mesh.triangles[" + std::to_string(idx) + "]: indices must be integers");
            }
            tri[static_cast<size_t>(c)] = t[static_cast<size_t>(c)].get<int>();
            if (tri[static_cast<size_t>(c)] < 0 ||
                tri[static_cast<size_t>(c)] >= static_cast<int>(raw.vertices.size())) {
                throw ValidationError(path + ": triangle " + std::to_string(idx) + " references vertex " +
                                      std::to_string(tri[static_cast<size_t>(c)]) + " out of range");
            }
        }
        raw.triangles.push_back(tri);
        ++idx;
    }

    const Json& skel = j["skeleton"];
    if (!skel.contains("bones") || !skel["bones"].is_array() || skel["bones"].empty()) {
        throw ParseError(path + ": skeleton.bones must be a non-empty array");
    }
    std::map<std::string, int> bone_index;
    std::vector<std::string> parent_names;
    for (const Json& b : skel["bones"]) {
        if (!b.contains("name") || !b["name"].is_string()) {
            throw ParseError(path + ": every bone needs a name");
        }
        BoneSpec spec;
        spec.name = b["name"].get<std::string>();
        if (bone_index.count(spec.name) != 0) {
            throw ValidationError(path + ": duplicate bone name '" + spec.name + "'");
        }
        spec.head = parse_vec3(b.at("head"), path + ": bone '" + spec.name + "' head");
        spec.tail = parse_vec3(b.at("tail"), path + ": bone '" + spec.name + "' tail");
        std::string parent;
        if (b.contains("parent") && !b["parent"].is_null()) {
            if (!b["parent"].is_string()) {
                throw ParseError(path + ": bone '" + spec.name + "': parent must be a name or null");
            }
            parent = b["parent"].get<std::string>();
        }
        bone_index[spec.name] = static_cast<int>(raw.bones.size());
        parent_names.push_back(parent);
        raw.bones.push_back(spec);
    }
    for (size_t i = 0; i < raw.bones.size(); ++i) {
        if (parent_names[i].empty()) continue;
        const auto it = bone_index.find(parent_names[i]);
        if (it == bone_index.end()) {
            throw ValidationError(path + ": bone '" + raw.bones[i].name + "': unknown parent '" +
                                  parent_names[i] + "'");
        }
        raw.bones[i].parent = it->second;
    }

    const Json& weights = j["weights"];
    if (!weights.is_array() || weights.size() != raw.vertices.size()) {
        throw ValidationError(path + ": weights must have one entry per vertex (" +
                              std::to_string(raw.vertices.size()) + ")");
    }
    raw.weights.resize(raw.vertices.size());
    for (size_t v = 0; v < weights.size(); ++v) {
        const Json& w = weights[v];
        if (!w.is_object()) {
            throw ParseError(path + ": weights[" + std::to_string(v) + "] must be a map");
        }
        VertexWeights vw;
        double sum = 0.0;
        for (const auto& [name, value] : w.items()) {
            const auto it = bone_index.find(name);
            if (it == bone_index.end()) {
                throw ValidationError(path + ": weights[" + std::to_string(v) + "]: unknown bone '" + name + "'");
            }
            if (!value.is_number()) {
                throw ParseError(path + ": weights[" + std::to_string(v) + "]['" + name + "'] must be a number");
            }
            vw.emplace_back(it->second, value.get<double>());
            sum += value.get<double>();
        }
        if (std::fabs(sum - 1.0) > 1e-4) {
            throw ValidationError(path + ": weights at vertex " + std::to_string(v) + " sum to " +
                                  std::to_string(sum) + " (expected 1 within 1e-4)");
        }
        std::sort(vw.begin(), vw.end());
        raw.weights[v].swap(vw); // placed below once resized
    }
    return raw;
}

// Drops degenerate triangles, builds the skeleton and part boxes.
Character build_character(RawCharacter raw) {
    Character c;
    c.mesh.vertices = std::move(raw.vertices);
    for (const auto& t : raw.triangles) {
        const Vec3& a = c.mesh.vertices[static_cast<size_t>(t[0])];
        const Vec3& b = c.mesh.vertices[static_cast<size_t>(t[1])];
        const Vec3& d = c.mesh.vertices[static_cast<size_t>(t[2])];
        if (0.5 * ((b - a).cross(d - a)).norm() <= 1e-12) continue;
        c.mesh.triangles.push_back(t);
    }
    c.skeleton = build_skeleton(raw.bones);
    c.weights = std::move(raw.weights);
    compute_part_boxes(c);
    return c;
}

} // namespace

Character load_character(const std::string& path) {
    return build_character(parse_character(path));
}

std::pair<Character, Character> load_character_pair(const std::string& src_path,
                                                    const std::string& tgt_path) {
    RawCharacter a = parse_character(src_path);
    RawCharacter b = parse_character(tgt_path);

    Aabb box;
    for (const Vec3& v : a.vertices) box.expand(v);
    for (const Vec3& v : b.vertices) box.expand(v);
    for (const BoneSpec& s : a.bones) {
        box.expand(s.head);
        box.expand(s.tail);
    }
    for (const BoneSpec& s : b.bones) {
        box.expand(s.head);
        box.expand(s.tail);
    }
    if (!box.valid() || box.extents().maxCoeff() <= 0.0) {
        throw ValidationError("characters have no spatial extent to normalize");
    }
    const Vec3 center = box.center();
    const double scale = 1.0 / box.extents().maxCoeff();
    auto apply = [&](RawCharacter& raw) {
        for (Vec3& v : raw.vertices) v = (v - center) * scale;
        for (BoneSpec& s : raw.bones) {
            s.head = (s.head - center) * scale;
            s.tail = (s.tail - center) * scale;
        }
    };
    apply(a);
    apply(b);
    return {build_character(std::move(a)), build_character(std::move(b))};
}

void save_character(const Character& character, const std::string& path) {
    Json j;
    j["format_version"] = 1;
    Json mesh;
    Json verts = Json::array();
    for (const Vec3& v : character.mesh.vertices) verts.push_back(vec3_json(v));
    Json tris = Json::array();
    for (const auto& t : character.mesh.triangles) tris.push_back(Json::array({t[0], t[1], t[2]}));
    mesh["vertices"] = std::move(verts);
    mesh["triangles"] = std::move(tris);
    j["mesh"] = std::move(mesh);

    Json bones = Json::array();
    for (const Bone& b : character.skeleton.bones) {
        Json bj;
        bj["name"] = b.name;
        if (b.parent >= 0) {
            bj["parent"] = character.skeleton.bone(b.parent).name;
        } else {
            bj["parent"] = nullptr;
        }
        bj["head"] = vec3_json(b.head);
        bj["tail"] = vec3_json(b.tail());
        bones.push_back(std::move(bj));
    }
    j["skeleton"] = Json{{"bones", std::move(bones)}};

    Json weights = Json::array();
    for (const VertexWeights& vw : character.weights) {
        Json w = Json::object();
        for (const auto& [bone, value] : vw) {
            w[character.skeleton.bone(bone).name] = value;
        }
        weights.push_back(std::move(w));
    }
    j["weights"] = std::move(weights);

    std::ofstream out(path);
    if (!out) throw ParseError(path + ": cannot open for writing");
    out << j.dump(2) << "\n";
}

namespace {

const char* kind_name(PairKind k) {
    switch (k) {
    case PairKind::OneToOne: return "one_to_one";
    case PairKind::OneToVoidSource: return "one_to_void_source";
    case PairKind::OneToVoidTarget: return "one_to_void_target";
    case PairKind::OneToManySource: return "one_to_many_source";
    case PairKind::OneToManyTarget: return "one_to_many_target";
    }
    return "?";
}

PairKind kind_from_name(const std::string& s, const std::string& path) {
    if (s == "one_to_one") return PairKind::OneToOne;
    if (s == "one_to_void_source") return PairKind::OneToVoidSource;
    if (s == "one_to_void_target") return PairKind::OneToVoidTarget;
    if (s == "one_to_many_source") return PairKind::OneToManySource;
    if (s == "one_to_many_target") return PairKind::OneToManyTarget;
    throw ParseError(path + ": unknown pair kind '" + s + "'");
}

int bone_id_by_name(const Skeleton& skel, const std::string& name, const std::string& path) {
    for (const Bone& b : skel.bones) {
        if (b.name == name) return b.id;
    }
    throw ValidationError(path + ": unknown bone name '" + name + "'");
}

} // namespace

std::string pairs_to_json(const std::vector<CorrespondencePair>& pairs,
                          const Skeleton& src, const Skeleton& tgt) {
    Json j;
    j["format_version"] = 1;
    Json arr = Json::array();
    for (const auto& p : pairs) {
        Json pj;
        pj["kind"] = kind_name(p.kind);
        Json sb = Json::array();
        for (int b : p.source_bones) sb.push_back(src.bone(b).name);
        Json tb = Json::array();
        for (int b : p.target_bones) tb.push_back(tgt.bone(b).name);
        pj["source_bones"] = std::move(sb);
        pj["target_bones"] = std::move(tb);
        arr.push_back(std::move(pj));
    }
    j["pairs"] = std::move(arr);
    return j.dump(2) + "\n";
}

void save_pairs(const std::vector<CorrespondencePair>& pairs,
                const Skeleton& src, const Skeleton& tgt, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError(path + ": cannot open for writing");
    out << pairs_to_json(pairs, src, tgt);
}

std::vector<CorrespondencePair> load_pairs(const std::string& path,
                                           const Skeleton& src, const Skeleton& tgt) {
    const Json j = parse_file(path);
    require_version(j, path);
    if (!j.contains("pairs") || !j["pairs"].is_array()) {
        throw ParseError(path + ": expected a pairs array");
    }
    std::vector<CorrespondencePair> pairs;
    for (const Json& pj : j["pairs"]) {
        CorrespondencePair p;
        if (!pj.contains("kind") || !pj["kind"].is_string()) {
            throw ParseError(path + ": every pair needs a kind");
        }
        p.kind = kind_from_name(pj["kind"].get<std::string>(), path);
        for (const Json& n : pj.value("source_bones", Json::array())) {
            p.source_bones.push_back(bone_id_by_name(src, n.get<std::string>(), path));
        }
        for (const Json& n : pj.value("target_bones", Json::array())) {
            p.target_bones.push_back(bone_id_by_name(tgt, n.get<std::string>(), path));
        }
        pairs.push_back(std::move(p));
    }
    validate_pairs(pairs, src, tgt);
    return pairs;
}

namespace {

const char* unified_kind_name(UnifiedKind k) {
    switch (k) {
    case UnifiedKind::Constrained: return "constrained";
    case UnifiedKind::Loose: return "loose";
    case UnifiedKind::Virtual: return "virtual";
    }
    return "?";
}

UnifiedKind unified_kind_from_name(const std::string& s, const std::string& path) {
    if (s == "constrained") return UnifiedKind::Constrained;
    if (s == "loose") return UnifiedKind::Loose;
    if (s == "virtual") return UnifiedKind::Virtual;
    throw ParseError(path + ": unknown unified bone kind '" + s + "'");
}

} // namespace

std::string unified_to_json(const UnifiedSkeleton& uni, const Skeleton& src, const Skeleton& tgt) {
    Json j;
    j["format_version"] = 1;
    j["t"] = uni.t;

    Json pairs = Json::array();
    for (const auto& p : uni.provenance) {
        Json pj;
        pj["kind"] = kind_name(p.kind);
        Json sb = Json::array();
        for (int b : p.source_bones) sb.push_back(src.bone(b).name);
        Json tb = Json::array();
        for (int b : p.target_bones) tb.push_back(tgt.bone(b).name);
        pj["source_bones"] = std::move(sb);
        pj["target_bones"] = std::move(tb);
        pairs.push_back(std::move(pj));
    }
    j["pairs"] = std::move(pairs);

    Json bones = Json::array();
    for (const UnifiedBone& k : uni.bones) {
        Json bj;
        bj["id"] = k.id;
        bj["name"] = k.name;
        bj["kind"] = unified_kind_name(k.kind);
        bj["source"] = k.source_ref ? Json(src.bone(*k.source_ref).name) : Json(nullptr);
        bj["target"] = k.target_ref ? Json(tgt.bone(*k.target_ref).name) : Json(nullptr);
        bj["parent"] = k.parent >= 0 ? Json(k.parent) : Json(nullptr);
        bj["pair"] = k.pair_index;
        bj["head"] = vec3_json(k.head);
        bj["tail"] = vec3_json(k.tail());
        bj["length"] = k.length;
        Json rot = Json::array();
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) rot.push_back(k.frame.rotation(r, c));
        }
        bj["rotation"] = std::move(rot);
        bj["box"] = Json{{"center", vec3_json(k.box.center)},
                         {"half_extents", vec3_json(k.box.half_extents)}};
        bj["split_range"] = k.split_range
                                ? Json::array({k.split_range->first, k.split_range->second})
                                : Json(nullptr);
        bones.push_back(std::move(bj));
    }
    j["bones"] = std::move(bones);
    return j.dump(2) + "\n";
}

void save_unified(const UnifiedSkeleton& uni, const Skeleton& src, const Skeleton& tgt,
                  const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError(path + ": cannot open for writing");
    out << unified_to_json(uni, src, tgt);
}

UnifiedSkeleton load_unified(const std::string& path, const Skeleton& src, const Skeleton& tgt) {
    const Json j = parse_file(path);
    require_version(j, path);
    UnifiedSkeleton uni;
    uni.t = j.value("t", 0.0);
    for (const Json& pj : j.at("pairs")) {
        CorrespondencePair p;
        p.kind = kind_from_name(pj.at("kind").get<std::string>(), path);
        for (const Json& n : pj.value("source_bones", Json::array())) {
            p.source_bones.push_back(bone_id_by_name(src, n.get<std::string>(), path));
        }
        for (const Json& n : pj.value("target_bones", Json::array())) {
            p.target_bones.push_back(bone_id_by_name(tgt, n.get<std::string>(), path));
        }
        uni.provenance.push_back(std::move(p));
    }
    for (const Json& bj : j.at("bones")) {
        UnifiedBone k;
        k.id = bj.at("id").get<int>();
        k.name = bj.at("name").get<std::string>();
        k.kind = unified_kind_from_name(bj.at("kind").get<std::string>(), path);
        if (!bj.at("source").is_null()) {
            k.source_ref = bone_id_by_name(src, bj.at("source").get<std::string>(), path);
        }
        if (!bj.at("target").is_null()) {
            k.target_ref = bone_id_by_name(tgt, bj.at("target").get<std::string>(), path);
        }
        k.parent = bj.at("parent").is_null() ? -1 : bj.at("parent").get<int>();
        k.pair_index = bj.at("pair").get<int>();
        k.t = uni.t;
        k.head = parse_vec3(bj.at("head"), path + ": bone head");
        k.length = bj.at("length").get<double>();
        const Json& rot = bj.at("rotation");
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) {
                k.frame.rotation(r, c) = rot.at(static_cast<size_t>(r * 3 + c)).get<double>();
            }
        }
        k.frame.origin = k.head;
        k.box.center = parse_vec3(bj.at("box").at("center"), path + ": box center");
        k.box.half_extents = parse_vec3(bj.at("box").at("half_extents"), path + ": box half_extents");
        if (!bj.at("split_range").is_null()) {
            k.split_range = {bj.at("split_range").at(0).get<double>(),
                             bj.at("split_range").at(1).get<double>()};
        }
        if (k.parent < 0) uni.root = k.id;
        uni.bones.push_back(std::move(k));
    }
    return uni;
}

namespace {

Vec3 parse_angles(const Json& a, const std::string& where) {
    const Vec3 v = parse_vec3(a, where);
    for (int c = 0; c < 3; ++c) {
        if (!std::isfinite(v[c]) || v[c] <= -360.0 || v[c] >= 360.0) {
            throw ValidationError(where + ": angles must be finite and within (-360, 360)");
        }
    }
    return v;
}

Pose parse_pose_object(const Json& angles, const UnifiedSkeleton& uni, const std::string& path) {
    Pose pose;
    for (const auto& [name, value] : angles.items()) {
        int id = -1;
        for (const UnifiedBone& k : uni.bones) {
            if (k.name == name) {
                id = k.id;
                break;
            }
        }
        if (id < 0) {
            throw ValidationError(path + ": unknown unified bone '" + name + "'");
        }
        pose[id] = JointAngles{parse_angles(value, path + ": angles['" + name + "']")};
    }
    return pose;
}

} // namespace

Pose load_pose(const std::string& path, const UnifiedSkeleton& uni) {
    const Json j = parse_file(path);
    require_version(j, path);
    if (!j.contains("angles") || !j["angles"].is_object()) {
        throw ParseError(path + ": expected an angles map");
    }
    return parse_pose_object(j["angles"], uni, path);
}

AnimationClip load_clip(const std::string& path, const UnifiedSkeleton& uni) {
    const Json j = parse_file(path);
    require_version(j, path);
    if (!j.contains("frames") || !j["frames"].is_array() || j["frames"].empty()) {
        throw ValidationError(path + ": clip needs a non-empty frames array");
    }
    AnimationClip clip;
    for (const Json& fj : j["frames"]) {
        AnimationFrame frame;
        if (!fj.contains("t") || !fj["t"].is_number()) {
            throw ParseError(path + ": every frame needs a numeric t");
        }
        frame.t = fj["t"].get<double>();
        if (!std::isfinite(frame.t) || frame.t < 0.0 || frame.t > 1.0) {
            throw ValidationError(path + ": frame t must be within [0, 1]");
        }
        if (fj.contains("angles")) {
            frame.pose = parse_pose_object(fj["angles"], uni, path);
        }
        clip.frames.push_back(std::move(frame));
    }
    return clip;
}

void save_obj(const Mesh& mesh, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (f == nullptr) throw ParseError(path + ": cannot open for writing");
    for (const Vec3& v : mesh.vertices) {
        std::fprintf(f, "v %.17g %.17g %.17g\n", v.x(), v.y(), v.z());
    }
    for (const auto& t : mesh.triangles) {
        std::fprintf(f, "f %d %d %d\n", t[0] + 1, t[1] + 1, t[2] + 1);
    }
    std::fclose(f);
}

void save_sdf_cache(const SdfGrid& grid, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (f == nullptr) throw ParseError(path + ": cannot open for writing");
    std::fwrite("RMXSDF1", 1, 7, f);
    for (int a = 0; a < 3; ++a) {
        const uint32_t d = static_cast<uint32_t>(grid.dims[static_cast<size_t>(a)]);
        std::fwrite(&d, sizeof(d), 1, f);
    }
    for (int a = 0; a < 3; ++a) {
        const double o = grid.origin[a];
        std::fwrite(&o, sizeof(o), 1, f);
    }
    std::fwrite(&grid.spacing, sizeof(grid.spacing), 1, f);
    for (double v : grid.values) {
        const float fv = static_cast<float>(v);
        std::fwrite(&fv, sizeof(fv), 1, f);
    }
    std::fclose(f);
}

SdfGrid load_sdf_cache(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (f == nullptr) throw ParseError(path + ": cannot open file");
    char magic[7];
    SdfGrid grid;
    bool ok = std::fread(magic, 1, 7, f) == 7 && std::memcmp(magic, "RMXSDF1", 7) == 0;
    uint32_t dims[3] = {0, 0, 0};
    ok = ok && std::fread(dims, sizeof(uint32_t), 3, f) == 3;
    double origin[3] = {0, 0, 0};
    ok = ok && std::fread(origin, sizeof(double), 3, f) == 3;
    ok = ok && std::fread(&grid.spacing, sizeof(double), 1, f) == 1;
    if (!ok) {
        std::fclose(f);
        throw ParseError(path + ": not a valid SDF cache file");
    }
    for (int a = 0; a < 3; ++a) {
        grid.dims[static_cast<size_t>(a)] = static_cast<int>(dims[a]);
        grid.origin[a] = origin[a];
    }
    const size_t count = static_cast<size_t>(dims[0]) * dims[1] * dims[2];
    grid.values.resize(count);
    std::vector<float> tmp(count);
    if (std::fread(tmp.data(), sizeof(float), count, f) != count) {
        std::fclose(f);
        throw ParseError(path + ": truncated SDF cache file");
    }
    std::fclose(f);
    for (size_t i = 0; i < count; ++i) grid.values[i] = tmp[i];

    bool any_pos = false, any_neg = false;
    for (double v : grid.values) {
        any_pos = any_pos || v > 0.0;
        any_neg = any_neg || v < 0.0;
    }
    if (!any_neg) grid.coverage = GridCoverage::AllEmpty;
    if (!any_pos) grid.coverage = GridCoverage::AllOccupied;
    return grid;
}

std::string segmentation_to_json(const Character& character) {
    const std::vector<int> assignment = segment_mesh(character);
    std::vector<std::vector<int>> parts(character.skeleton.bones.size());
    for (size_t v = 0; v < assignment.size(); ++v) {
        parts[static_cast<size_t>(assignment[v])].push_back(static_cast<int>(v));
    }
    Json j;
    j["format_version"] = 1;
    Json arr = Json::array();
    for (const Bone& b : character.skeleton.bones) {
        Json pj;
        pj["bone"] = b.name;
        pj["vertices"] = parts[static_cast<size_t>(b.id)];
        arr.push_back(std::move(pj));
    }
    j["parts"] = std::move(arr);
    return j.dump(2) + "\n";
}

} // namespace rigmixer
