#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace slogic {

// Pipeline hyperparameters; keys are named after the paper symbols where one
// exists. Dataset presets fill the per-dataset defaults; any key can then be
// overridden by a config file or a CLI flag.
struct PipelineConfig {
    std::string dataset;  // wn18rr | fb15k-237 | yago3-10 | (empty = generic)
    std::string train_path;
    std::string valid_path;
    std::string test_path;
    std::string out_dir = "out";

    int L = 3;              // max rule body length
    int k = 1;              // subgraph hops
    int alpha = 100;        // BFS neighbor cap
    int k_pos = 5;
    int k_neg = 20;
    int K = 0;              // negative pool size; 0 = auto (2 * N)
    double epsilon = 1.0;   // margin
    double lr = 0.001;
    int epochs = 5;
    int dim = 128;
    double dropout = 0.5;
    int gnn_layers = 1;
    int mlp_hidden = 0;     // 0 = auto (dim)
    int N = 50;             // candidate rules per query
    double T = 0.5;         // softmax temperature
    double tau = 2.0;       // tanh scale
    double z = 1.96;
    double sample_fraction = 1.0;
    std::int64_t min_body_count = 1;
    int batch_size = 32;
    std::uint64_t seed = 0;
    int threads = 1;
    std::int64_t ground_cap = 2147483647;
    bool fallback_on_empty = false;

    int resolved_K() const { return K > 0 ? K : 2 * N; }
    int resolved_mlp_hidden() const { return mlp_hidden > 0 ? mlp_hidden : dim; }

    // Applies key=value pairs; "dataset" presets apply before other keys.
    void apply(const std::map<std::string, std::string>& kv);

    std::map<std::string, std::string> to_map() const;
};

// Flat key=value file; '#' starts a comment, blank lines ignored.
std::map<std::string, std::string> parse_config_file(const std::string& path);

void apply_dataset_preset(PipelineConfig& cfg, const std::string& dataset);

}  // namespace slogic
