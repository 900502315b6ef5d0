#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "slogic/instances.hpp"
#include "slogic/rules.hpp"
#include "slogic/subgraph.hpp"
#include "slogic/tape.hpp"

namespace slogic {

struct ModelConfig {
    int dim = 128;
    int gnn_layers = 2;
    int mlp_hidden = 128;
    int num_relations_aug = 0;
    double dropout = 0.5;
};

// All trainable tensors. The relation table has one extra row, the padding
// slot, which is masked out of the recurrence and therefore never receives
// gradient.
struct ModelParams {
    ModelConfig cfg;

    ad::Mat rel_emb;  // (num_relations_aug + 1) x dim

    struct RgcnLayer {
        ad::Mat w_self;               // d_in x d_out
        std::vector<ad::Mat> w_rel;   // one per augmented relation
        ad::Mat bias;                 // 1 x d_out
    };
    std::vector<RgcnLayer> gnn;

    struct Gru {
        ad::Mat wz, uz, bz;
        ad::Mat wr, ur, br;
        ad::Mat wh, uh, bh;
    } gru;

    ad::Mat mlp_w1, mlp_b1;  // (4*dim + 4) x hidden
    ad::Mat mlp_w2, mlp_b2;  // hidden x 1

    int padding_index() const { return cfg.num_relations_aug; }

    static ModelParams init(const ModelConfig& cfg, std::uint64_t seed);
    ModelParams zeros_like() const;

    // Stable name -> tensor walk; same order for params, gradients and
    // optimizer moments.
    std::vector<std::pair<std::string, ad::Mat*>> tensors();
    std::vector<std::pair<std::string, const ad::Mat*>> tensors() const;
};

// Static rule features fed to the MLP: [ln(1+support), confidence, laplace,
// wilson]. The ratios pass through raw.
Eigen::RowVector4d static_features(const RuleStats& stats);

double margin_loss(double pos, double neg, double epsilon);

// --- Tape-building blocks (shared by training and inference) ---

struct ParamVars {
    ad::Var rel_emb;
    struct Layer {
        ad::Var w_self;
        std::vector<ad::Var> w_rel;
        ad::Var bias;
    };
    std::vector<Layer> gnn;
    struct {
        ad::Var wz, uz, bz, wr, ur, br, wh, uh, bh;
    } gru;
    ad::Var mlp_w1, mlp_b1, mlp_w2, mlp_b2;
};

// grads may be null for inference-only tapes.
ParamVars make_param_vars(ad::Tape& tape, const ModelParams& params, ModelParams* grads);

// Per-relation incoming-edge mean-normalized coefficients for one subgraph.
// Must outlive any tape calls that reference it.
struct MessageAdjacency {
    std::vector<std::pair<RelationId, ad::SparseCoeffs>> per_relation;
};
MessageAdjacency build_message_adjacency(const Subgraph& sg);

struct SubgraphEncoding {
    ad::Var head;    // 1 x dim
    ad::Var pooled;  // 1 x dim
};

SubgraphEncoding encode_subgraph(ad::Tape& tape, const ParamVars& pv, const ModelConfig& cfg, const Subgraph& sg,
                                 const MessageAdjacency& adj, bool training, Rng& rng);

// Encodes a batch of rule bodies, left-padded to batch_max_len; padded steps
// leave the hidden state untouched, so the result does not depend on
// batch_max_len. Returns |bodies| x dim.
ad::Var encode_bodies(ad::Tape& tape, const ParamVars& pv, const ModelConfig& cfg,
                      std::span<const std::vector<RelationId>> bodies, int batch_max_len);

// Scores every body against one (subgraph, query relation) context;
// returns |bodies| x 1.
ad::Var score_rules(ad::Tape& tape, const ParamVars& pv, const ModelConfig& cfg, const SubgraphEncoding& enc,
                    RelationId query_relation, std::span<const std::vector<RelationId>> bodies,
                    const ad::Mat& static_feats, bool training, Rng& rng);

// --- Evaluation-mode conveniences ---

std::pair<Eigen::RowVectorXd, Eigen::RowVectorXd> encode_subgraph_eval(const ModelParams& params, const Subgraph& sg);
Eigen::RowVectorXd encode_body_eval(const ModelParams& params, const std::vector<RelationId>& body, int batch_max_len);
double score_eval(const ModelParams& params, const Subgraph& sg, RelationId query_relation,
                  const std::vector<RelationId>& body, const Eigen::RowVector4d& feats);
std::vector<double> score_many_eval(const ModelParams& params, const Subgraph& sg, RelationId query_relation,
                                    std::span<const std::vector<RelationId>> bodies, const ad::Mat& static_feats);

// Mean margin loss over every (positive, negative) pair in `records`,
// with the target edge removed from each record's subgraph before encoding.
// When `grads` is non-null they are zeroed and filled by backprop.
double batch_loss(const ModelParams& params, std::span<const TrainingRecord> records, const SubgraphStore& store,
                  const RuleBase& rule_base, const KnowledgeGraph& g, double epsilon, bool training,
                  std::uint64_t dropout_seed, ModelParams* grads);

struct AdamConfig {
    double lr = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct AdamState {
    AdamState() = default;
    explicit AdamState(const ModelParams& params) : m(params.zeros_like()), v(params.zeros_like()) {}
    ModelParams m, v;
    std::int64_t step = 0;
};

void adam_step(ModelParams& params, ModelParams& grads, AdamState& state, const AdamConfig& cfg);

struct TrainConfig {
    double lr = 0.001;
    double epsilon = 1.0;  // margin
    int epochs = 5;
    int batch_size = 32;
    std::uint64_t seed = 0;
    bool verbose = false;
};

struct TrainResult {
    std::vector<double> epoch_loss;
    std::int64_t steps = 0;
};

// Adam on mean margin loss; aborts with diagnostics on non-finite loss.
// Fixed seed gives a reproducible loss curve and final parameters.
TrainResult train(ModelParams& params, AdamState& adam, const std::vector<TrainingRecord>& records,
                  const SubgraphStore& store, const RuleBase& rule_base, const KnowledgeGraph& g,
                  const TrainConfig& cfg);

// Versioned checkpoint: config, tensors, optional optimizer state, and a
// key=value training-config snapshot.
void save_checkpoint(const std::string& path, const ModelParams& params, const AdamState* adam,
                     const std::map<std::string, std::string>& snapshot);
struct Checkpoint {
    ModelParams params;
    AdamState adam;
    bool has_adam = false;
    std::map<std::string, std::string> snapshot;
};
Checkpoint load_checkpoint(const std::string& path);

}  // namespace slogic
