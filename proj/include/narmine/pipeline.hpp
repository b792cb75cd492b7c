#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace narmine::pipeline {

struct PipelineConfig {
    std::string corpus_path;
    std::string dictionary_path;
    std::string output_dir;

    std::int64_t min_occurrences = 500;
    double min_confidence = 0.9;
    double backbone_alpha = 0.05;
    std::vector<std::string> algorithms = {"walktrap", "multilevel", "fastgreedy"};
    double polarization_threshold = 0.95;
    bool occurrence_weighted_labels = false;
    std::int64_t pom_min_likes = 4;
    std::optional<std::int64_t> censor_horizon;
    std::uint64_t seed = 7;
};

struct ArtifactRecord {
    std::string path;  // relative to the output dir
    std::uint64_t bytes = 0;
    std::string sha256;
};

struct StageRecord {
    std::string name;
    std::string status;  // run | cached | failed | skipped
    std::string input_hash;
    std::vector<ArtifactRecord> outputs;
    std::string error;
};

struct RunReport {
    bool ok = false;
    std::vector<StageRecord> stages;
    std::string manifest_path;
    std::string failed_stage;  // empty when ok
};

// Stage order: ingest, dtm, cooccur, backbone, communities, label-posts,
// classify-users, fit-tail, survival, pom. Stages whose cascaded input hash
// matches the previous manifest and whose artifacts verify are not re-run.
RunReport run_pipeline(const PipelineConfig& config);

}  // namespace narmine::pipeline
