#include "slogic/inference.hpp"

#include <algorithm>
#include <cmath>

#include "slogic/instances.hpp"

namespace slogic {

std::vector<std::int32_t> candidate_rules(const KnowledgeGraph& g, const RuleBase& rule_base, EntityId h,
                                          RelationId r, int top_n) {
    std::vector<std::int32_t> out;
    if (h < 0 || h >= g.num_entities) return out;
    for (std::int32_t idx : rule_base.for_head(r)) {
        if (static_cast<int>(out.size()) >= top_n) break;
        if (locally_applicable(g, h, rule_base.rules()[static_cast<std::size_t>(idx)].first.body)) {
            out.push_back(idx);
        }
    }
    return out;
}

std::vector<double> softmax_weights(const std::vector<double>& phis, double temperature) {
    if (phis.empty()) throw std::invalid_argument("softmax over empty score list");
    const double max_phi = *std::max_element(phis.begin(), phis.end());
    std::vector<double> w(phis.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < phis.size(); ++i) {
        w[i] = std::exp((phis[i] - max_phi) / temperature);
        sum += w[i];
    }
    for (double& x : w) x /= sum;
    return w;
}

std::vector<std::pair<EntityId, std::int64_t>> ground_rule(const KnowledgeGraph& g, EntityId h,
                                                           const std::vector<RelationId>& body, std::int64_t cap) {
    if (body.empty()) throw std::invalid_argument("rule body must be non-empty");
    SparseScratch scratch;
    std::vector<std::pair<EntityId, std::int64_t>> frontier{{h, 1}};
    for (RelationId rel : body) {
        frontier = count_propagate(g.adjacency[static_cast<std::size_t>(rel)], frontier, cap, scratch);
        if (frontier.empty()) break;
    }
    return frontier;
}

double binarize(std::int64_t count, double tau) { return std::tanh(static_cast<double>(count) / tau); }

std::vector<double> NeuralRuleScorer::operator()(EntityId h, RelationId r,
                                                 const std::vector<std::int32_t>& rule_ids) const {
    std::vector<std::vector<RelationId>> bodies;
    bodies.reserve(rule_ids.size());
    ad::Mat feats(static_cast<Eigen::Index>(rule_ids.size()), 4);
    for (std::size_t i = 0; i < rule_ids.size(); ++i) {
        const auto& [rule, stats] = rule_base_.rules()[static_cast<std::size_t>(rule_ids[i])];
        bodies.push_back(rule.body);
        feats.row(static_cast<Eigen::Index>(i)) = static_features(stats);
    }
    return score_many_eval(params_, store_.at(h), r, bodies, feats);
}

std::vector<double> StaticRuleScorer::operator()(EntityId, RelationId, const std::vector<std::int32_t>& rule_ids) const {
    std::vector<double> out;
    out.reserve(rule_ids.size());
    for (std::int32_t idx : rule_ids) out.push_back(rule_base_.rules()[static_cast<std::size_t>(idx)].second.wilson);
    return out;
}

Eigen::VectorXd fallback_scores(RelationId r, const std::vector<Triple>& train_triples, int num_entities,
                                int num_relations_orig) {
    Eigen::VectorXd scores = Eigen::VectorXd::Zero(num_entities);
    const bool inverse = r >= num_relations_orig;
    const RelationId orig = inverse ? r - num_relations_orig : r;
    for (const Triple& t : train_triples) {
        if (t.relation != orig) continue;
        scores(inverse ? t.head : t.tail) += 1.0;
    }
    return scores;
}

AnswerVector answer_query(const RuleScorer& scorer, const KnowledgeGraph& g, const RuleBase& rule_base, EntityId h,
                          RelationId r, const InferenceConfig& cfg) {
    AnswerVector ans;
    ans.scores = Eigen::VectorXd::Zero(g.num_entities);

    const bool unseen_head = h < 0 || h >= g.num_entities || g.global_degree[static_cast<std::size_t>(h)] == 0;
    std::vector<std::int32_t> candidates;
    if (!unseen_head) candidates = candidate_rules(g, rule_base, h, r, cfg.top_n);

    if (unseen_head || (candidates.empty() && cfg.fallback_on_empty)) {
        ans.scores = fallback_scores(r, g.triples, g.num_entities, g.num_relations_orig);
        ans.used_fallback = true;
        return ans;
    }
    if (candidates.empty()) return ans;  // all-zero; expected rank handles the tie

    const std::vector<double> phis = scorer(h, r, candidates);
    const std::vector<double> weights = softmax_weights(phis, cfg.temperature);
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const auto& body = rule_base.rules()[static_cast<std::size_t>(candidates[i])].first.body;
        for (const auto& [entity, count] : ground_rule(g, h, body, cfg.ground_cap)) {
            ans.scores(entity) += weights[i] * binarize(count, cfg.tanh_scale);
        }
        ans.contributing.push_back({candidates[i], phis[i], weights[i]});
    }
    return ans;
}

AnswerVector static_answer_query(const KnowledgeGraph& g, const RuleBase& rule_base, EntityId h, RelationId r,
                                 const InferenceConfig& cfg) {
    return answer_query(StaticRuleScorer(rule_base), g, rule_base, h, r, cfg);
}

}  // namespace slogic
