#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <limits>
#include <vector>

#include "slogic/kg.hpp"
#include "slogic/model.hpp"
#include "slogic/rules.hpp"
#include "slogic/subgraph.hpp"

namespace slogic {

struct InferenceConfig {
    int top_n = 50;            // N: candidate rules per query
    double temperature = 0.5;  // T
    double tanh_scale = 2.0;   // tau
    std::int64_t ground_cap = std::numeric_limits<std::int32_t>::max();
    // The paper's fallback covers unseen heads only; zero-candidate queries
    // optionally route there too.
    bool fallback_on_empty = false;
};

struct AnswerVector {
    Eigen::VectorXd scores;  // |E|, nonnegative
    struct Contribution {
        std::int32_t rule_idx;  // into RuleBase::rules()
        double phi;
        double weight;
    };
    std::vector<Contribution> contributing;
    bool used_fallback = false;
};

// Top-N locally applicable rule indices for (h, r), Wilson order.
std::vector<std::int32_t> candidate_rules(const KnowledgeGraph& g, const RuleBase& rule_base, EntityId h,
                                          RelationId r, int top_n);

// Temperature softmax with max-subtraction; weights sum to 1.
std::vector<double> softmax_weights(const std::vector<double>& phis, double temperature);

// Walk counts from h along body, counting semiring, saturating at cap.
std::vector<std::pair<EntityId, std::int64_t>> ground_rule(const KnowledgeGraph& g, EntityId h,
                                                           const std::vector<RelationId>& body,
                                                           std::int64_t cap = std::numeric_limits<std::int32_t>::max());

double binarize(std::int64_t count, double tau);

// phi provider for candidate rules of one query.
class RuleScorer {
public:
    virtual ~RuleScorer() = default;
    virtual std::vector<double> operator()(EntityId h, RelationId r, const std::vector<std::int32_t>& rule_ids) const = 0;
};

// Trained model phi; one subgraph encoding shared by all N candidates.
class NeuralRuleScorer : public RuleScorer {
public:
    NeuralRuleScorer(const ModelParams& params, const SubgraphStore& store, const RuleBase& rule_base)
        : params_(params), store_(store), rule_base_(rule_base) {}
    std::vector<double> operator()(EntityId h, RelationId r, const std::vector<std::int32_t>& rule_ids) const override;

private:
    const ModelParams& params_;
    const SubgraphStore& store_;
    const RuleBase& rule_base_;
};

// Baseline: static Wilson score stands in for phi, everything else identical.
class StaticRuleScorer : public RuleScorer {
public:
    explicit StaticRuleScorer(const RuleBase& rule_base) : rule_base_(rule_base) {}
    std::vector<double> operator()(EntityId, RelationId, const std::vector<std::int32_t>& rule_ids) const override;

private:
    const RuleBase& rule_base_;
};

// Tail frequency of r over a training triple list (inverse ids count heads
// of the original relation).
Eigen::VectorXd fallback_scores(RelationId r, const std::vector<Triple>& train_triples, int num_entities,
                                int num_relations_orig);

AnswerVector answer_query(const RuleScorer& scorer, const KnowledgeGraph& g, const RuleBase& rule_base, EntityId h,
                          RelationId r, const InferenceConfig& cfg);

AnswerVector static_answer_query(const KnowledgeGraph& g, const RuleBase& rule_base, EntityId h, RelationId r,
                                 const InferenceConfig& cfg);

}  // namespace slogic
