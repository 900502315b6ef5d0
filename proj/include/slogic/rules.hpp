#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "slogic/types.hpp"

namespace slogic {

// A chain rule head <- body, body being the relational path. Relation ids
// are augmented ids, so bodies and heads may name inverse relations.
struct Rule {
    RelationId head = 0;
    std::vector<RelationId> body;

    friend bool operator==(const Rule&, const Rule&) = default;
};

struct RuleHash {
    std::size_t operator()(const Rule& r) const {
        std::uint64_t h = static_cast<std::uint32_t>(r.head);
        for (RelationId b : r.body) h = h * 0x100000001b3ULL + static_cast<std::uint32_t>(b) + 1;
        return static_cast<std::size_t>(h ^ (h >> 32));
    }
};

struct RuleStats {
    std::int64_t support = 0;     // #(body, head) entity pairs
    std::int64_t body_count = 0;  // #(body) entity pairs
    double confidence = 0.0;
    double laplace = 0.0;  // add-one estimator (support+1)/(body_count+2)
    double wilson = 0.0;
    double z = 1.96;
};

// Lower bound of the Wilson score interval for an observed ratio p over n
// trials. Defined as 0 when n == 0 or p <= 0 so unsupported rules rank last.
double wilson_lower(double p, std::int64_t n, double z);

// Deterministic ordering for per-relation rule indexes: wilson desc, then
// support desc, shorter body first, then lexicographic body.
bool rule_index_less(const Rule& ra, const RuleStats& sa, const Rule& rb, const RuleStats& sb);

class RuleBase {
public:
    RuleBase() = default;
    RuleBase(std::vector<std::pair<Rule, RuleStats>> rules, int num_relations_aug);

    const std::vector<std::pair<Rule, RuleStats>>& rules() const { return rules_; }

    // Rule indices for a head relation, sorted by rule_index_less.
    const std::vector<std::int32_t>& for_head(RelationId r) const { return index_.at(static_cast<std::size_t>(r)); }

    const RuleStats* find(RelationId head, const std::vector<RelationId>& body) const {
        auto it = lookup_.find(Rule{head, body});
        return it == lookup_.end() ? nullptr : &rules_[static_cast<std::size_t>(it->second)].second;
    }

    std::size_t size() const { return rules_.size(); }

    void save_tsv(const std::string& path, const Vocabulary& vocab) const;
    static RuleBase load_tsv(const std::string& path, const Vocabulary& vocab);

private:
    std::vector<std::pair<Rule, RuleStats>> rules_;
    std::vector<std::vector<std::int32_t>> index_;
    std::unordered_map<Rule, std::int32_t, RuleHash> lookup_;
};

}  // namespace slogic
