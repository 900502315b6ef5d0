#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "slogic/kg.hpp"
#include "slogic/rules.hpp"

namespace slogic {

// One training record: a query triple (possibly inverse direction), one
// positive rule body that derives the tail, and the hard negatives paired
// with it.
struct TrainingRecord {
    Triple query;  // relation may be an inverse id
    std::vector<RelationId> positive;
    std::vector<std::vector<RelationId>> negatives;
};

struct NegativePoolConfig {
    int pool_size = 100;  // top-K Wilson candidates
    int k_neg = 20;
    std::uint64_t seed = 0;
};

// True iff the body grounds starting from h (sparse frontier propagation on
// the full augmented graph).
bool locally_applicable(const KnowledgeGraph& g, EntityId h, const std::vector<RelationId>& body);

// Rule-base bodies for r that reach t from h with the target edge pair
// masked; min(k_pos, available) sampled without replacement.
std::vector<std::vector<RelationId>> positive_bodies(const KnowledgeGraph& g, EntityId h, RelationId r, EntityId t,
                                                     const RuleBase& rule_base, int k_pos, std::uint64_t seed);

// Top-K Wilson pool of locally applicable bodies for r, minus those that
// reach t; min(k_neg, remaining) sampled without replacement. Applicability
// and reach checks mask the target edge pair.
std::vector<std::vector<RelationId>> hard_negatives(const KnowledgeGraph& g, EntityId h, RelationId r, EntityId t,
                                                    const RuleBase& rule_base, const NegativePoolConfig& cfg);

struct GenerateConfig {
    int k_pos = 5;
    int k_neg = 20;
    int pool_size = 100;
    std::uint64_t seed = 0;
    int threads = 1;
};

struct GenerateStats {
    std::int64_t queries = 0;             // triples x directions
    std::int64_t queries_with_pairs = 0;  // contributed at least one record
    std::int64_t records = 0;             // (positive, negative-set) pairings
    std::int64_t pairs = 0;               // individual (positive, negative) pairs
};

// Streams records for both query directions of every training triple, in
// triple order then positive order. The sink sees records in that fixed
// order regardless of thread count.
GenerateStats generate(const KnowledgeGraph& g, const RuleBase& rule_base, const GenerateConfig& cfg,
                       const std::function<void(const TrainingRecord&)>& sink);

std::vector<TrainingRecord> generate_records(const KnowledgeGraph& g, const RuleBase& rule_base,
                                             const GenerateConfig& cfg, GenerateStats* stats = nullptr);

void write_instances_tsv(const std::string& path, const KnowledgeGraph& g, const RuleBase& rule_base,
                         const GenerateConfig& cfg, GenerateStats* stats = nullptr);
std::vector<TrainingRecord> read_instances_tsv(const std::string& path, const Vocabulary& vocab);

}  // namespace slogic
