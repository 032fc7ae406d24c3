#pragma once

// File formats: character JSON (mesh + skeleton + weights), correspondence
// pairs, unified skeleton export, pose/animation files, OBJ meshes, and the
// binary SDF cache. All JSON schemas carry "format_version": 1.

#include <string>
#include <utility>
#include <vector>

#include "rigmixer/correspondence.hpp"
#include "rigmixer/pose.hpp"
#include "rigmixer/sdf.hpp"
#include "rigmixer/skeleton.hpp"
#include "rigmixer/unify.hpp"

namespace rigmixer {

// Loads one character as stored (no normalization). Derived quantities
// (frames, levels, part boxes) are computed. Throws ParseError for
// malformed files, ValidationError for violated invariants.
Character load_character(const std::string& path);

// Loads both characters of a run and jointly normalizes them so the union
// bounding box of the two meshes has maximum extent 1, centered at the
// origin. All correspondence cost terms assume this scale.
std::pair<Character, Character> load_character_pair(const std::string& src_path,
                                                    const std::string& tgt_path);

void save_character(const Character& character, const std::string& path);

std::vector<CorrespondencePair> load_pairs(const std::string& path,
                                           const Skeleton& src, const Skeleton& tgt);
void save_pairs(const std::vector<CorrespondencePair>& pairs,
                const Skeleton& src, const Skeleton& tgt, const std::string& path);
std::string pairs_to_json(const std::vector<CorrespondencePair>& pairs,
                          const Skeleton& src, const Skeleton& tgt);

void save_unified(const UnifiedSkeleton& uni, const Skeleton& src, const Skeleton& tgt,
                  const std::string& path);
UnifiedSkeleton load_unified(const std::string& path, const Skeleton& src, const Skeleton& tgt);
std::string unified_to_json(const UnifiedSkeleton& uni, const Skeleton& src, const Skeleton& tgt);

// Pose file: {"format_version":1, "angles": {bone-name: [rx, ry, rz]}},
// degrees, intrinsic XYZ. Unknown names throw ValidationError.
Pose load_pose(const std::string& path, const UnifiedSkeleton& uni);

// Animation clip: ordered frames of {"t": real, "angles": {...}}.
AnimationClip load_clip(const std::string& path, const UnifiedSkeleton& uni);

void save_obj(const Mesh& mesh, const std::string& path);

// Binary SDF cache: magic "RMXSDF1", u32 dims[3], f64 origin[3],
// f64 spacing, then dims-product f32 values in x-fastest order,
// little-endian throughout.
void save_sdf_cache(const SdfGrid& grid, const std::string& path);
SdfGrid load_sdf_cache(const std::string& path);

// Segmentation export: {"format_version":1, "parts":[{"bone": name,
// "vertices": [...]}]}.
std::string segmentation_to_json(const Character& character);

} // namespace rigmixer
