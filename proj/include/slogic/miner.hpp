#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <unordered_map>
#include <vector>

#include "slogic/kg.hpp"
#include "slogic/rules.hpp"

namespace slogic {

// Relational paths of all simple paths h -> t of length <= max_len over the
// augmented graph. Distinct node sequences sharing a relational path yield
// one entry. When `excluded` is set, the directed edge (h, r, t) and its
// inverse are not traversable (leakage rule for mining and grounding).
std::set<std::vector<RelationId>> enumerate_simple_paths(const KnowledgeGraph& g, EntityId h, EntityId t, int max_len,
                                                         const std::optional<Triple>& excluded = std::nullopt);

// Candidate (head, body) multiset from DFS over sampled training triples,
// represented compactly as occurrence counts. Both query directions of each
// sampled triple contribute, so inverse head relations are indexed too.
using CandidateCounts = std::unordered_map<Rule, std::int64_t, RuleHash>;

CandidateCounts mine_rules(const KnowledgeGraph& g, int max_len, double sample_fraction, std::uint64_t seed,
                           int threads = 1);

// Number of entity pairs (x, y) connected by at least one walk labelled by
// `body` — boolean chain product, not walk counts.
std::int64_t body_count(const KnowledgeGraph& g, const std::vector<RelationId>& body);

// Entity pairs connected by both the body path and the head relation.
std::int64_t support(const KnowledgeGraph& g, const std::vector<RelationId>& body, RelationId head_relation);

struct RuleBaseConfig {
    double z = 1.96;
    std::int64_t min_body_count = 1;
    int threads = 1;
};

RuleBase build_rule_base(const CandidateCounts& candidates, const KnowledgeGraph& g, const RuleBaseConfig& cfg = {});

}  // namespace slogic
