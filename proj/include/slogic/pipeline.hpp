#pragma once

#include <string>

#include "slogic/config.hpp"
#include "slogic/evaluator.hpp"

namespace slogic {

// Artifact layout inside the output directory. Every stage writes its
// artifact plus a sidecar manifest recording config, seed, input hashes and
// wall time, so downstream stages can detect missing or stale inputs.
struct StagePaths {
    explicit StagePaths(const std::string& out_dir);
    std::string out_dir;
    std::string graph_cache;
    std::string rules_tsv;
    std::string subgraphs_bin;
    std::string instances_tsv;
    std::string checkpoint_bin;
    std::string metrics_txt;
};

void run_mine(const PipelineConfig& cfg);
void run_subgraphs(const PipelineConfig& cfg);
void run_instances(const PipelineConfig& cfg);
void run_train(const PipelineConfig& cfg);

struct EvalResult {
    Metrics model;
    Metrics baseline;
    bool has_model = false;
    bool has_baseline = false;
};
EvalResult run_eval(const PipelineConfig& cfg, bool with_baseline);

// Prints ranked answers with contributing rules; returns the report text.
std::string run_infer(const PipelineConfig& cfg, const std::string& head_name, const std::string& relation_name,
                      int top_k);

}  // namespace slogic
