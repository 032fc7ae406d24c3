#pragma once

// End-to-end orchestration: correspond -> unify(t) -> pose transfer ->
// interpolate -> surface extraction, with per-stage error tags.

#include <string>
#include <vector>

#include "rigmixer/correspondence.hpp"
#include "rigmixer/field.hpp"

namespace rigmixer {

// Pipeline error carrying the stage it happened in
// (correspond|unify|pose|interpolate|extract).
struct StagedError : Error {
    StagedError(std::string stage_name, const std::string& message)
        : Error("[" + stage_name + "] " + message), stage(std::move(stage_name)) {}
    std::string stage;
};

struct PipelineConfig {
    int resolution = 128;
    AlphaParams alpha;
    std::vector<double> t_schedule{0.5}; // used when no clip is given
    QueryMode mode = QueryMode::Voxelize;
    std::string pairs_path;  // optional: replaces computed pairs wholesale
    std::string clip_path;   // optional: per-frame poses and t values
    std::string output_dir;
    Exec exec = Exec::Parallel;
};

struct PipelineResult {
    std::vector<CorrespondencePair> pairs;
    std::vector<std::string> written; // paths, in write order
};

// Writes correspondence.json, frame_NNNN_skeleton.json and frame_NNNN.obj
// under config.output_dir. Deterministic for identical inputs and config.
PipelineResult run_pipeline(const std::string& src_path, const std::string& tgt_path,
                            const PipelineConfig& config);

} // namespace rigmixer
