#pragma once

#include <Eigen/Core>
#include <functional>
#include <unordered_set>
#include <vector>

#include "slogic/inference.hpp"
#include "slogic/kg.hpp"

namespace slogic {

struct DirectionMetrics {
    double mrr = 0.0;
    double hits1 = 0.0;
    double hits10 = 0.0;
    std::int64_t num_queries = 0;
};

struct Metrics {
    double mrr = 0.0;
    double hits1 = 0.0;
    double hits10 = 0.0;
    std::int64_t num_queries = 0;
    std::int64_t fallback_count = 0;
    DirectionMetrics forward;
    DirectionMetrics inverse;
};

// Tie-aware rank over all entities minus filter_out: with m entities scoring
// strictly above the target and n_tied sharing its score (target included),
// the rank is m + (n_tied + 1) / 2 — the mean position over uniform tie
// orderings, m + 1 when untied.
double expected_rank(const Eigen::VectorXd& scores, EntityId target, const std::unordered_set<EntityId>& filter_out);

using AnswerFn = std::function<AnswerVector(EntityId h, RelationId r)>;

// Filtered evaluation: for each test triple, the forward query (h, r, ?)
// and the inverse query (t, inv r, ?); known answers from all splits are
// filtered out, the target kept.
Metrics evaluate(const AnswerFn& answer, const std::vector<Triple>& test_triples,
                 std::span<const std::vector<Triple>> all_splits, const KnowledgeGraph& g, int threads = 1);

std::string format_metrics(const Metrics& m);

}  // namespace slogic
