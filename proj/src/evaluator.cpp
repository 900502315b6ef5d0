#include "slogic/evaluator.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "slogic/util.hpp"

namespace slogic {

double expected_rank(const Eigen::VectorXd& scores, EntityId target, const std::unordered_set<EntityId>& filter_out) {
    if (filter_out.contains(target)) throw std::logic_error("expected_rank: target is filtered out");
    const double target_score = scores(target);
    std::int64_t higher = 0;
    std::int64_t tied = 0;  // includes the target
    for (EntityId e = 0; e < scores.size(); ++e) {
        if (e != target && filter_out.contains(e)) continue;
        const double s = scores(e);
        if (s > target_score) {
            ++higher;
        } else if (s == target_score) {
            ++tied;
        }
    }
    return static_cast<double>(higher) + static_cast<double>(tied + 1) / 2.0;
}

Metrics evaluate(const AnswerFn& answer, const std::vector<Triple>& test_triples,
                 std::span<const std::vector<Triple>> all_splits, const KnowledgeGraph& g, int threads) {
    const TailFilter filter(g, all_splits);

    // Inductive splits may name entities beyond the training vocabulary;
    // they join the ranking pool with score zero.
    Eigen::Index num_candidates = g.num_entities;
    for (const Triple& t : test_triples) {
        num_candidates = std::max<Eigen::Index>(num_candidates, std::max(t.head, t.tail) + 1);
    }

    struct QueryOutcome {
        double rank = 0.0;
        bool inverse_dir = false;
        bool fallback = false;
    };
    std::vector<QueryOutcome> outcomes(test_triples.size() * 2);

    parallel_for(outcomes.size(), threads, [&](std::size_t qi) {
        const Triple& t = test_triples[qi / 2];
        const bool inverse_dir = (qi % 2) == 1;
        const EntityId h = inverse_dir ? t.tail : t.head;
        const RelationId r = inverse_dir ? g.inverse(t.relation) : t.relation;
        const EntityId target = inverse_dir ? t.head : t.tail;

        AnswerVector ans = answer(h, r);
        if (ans.scores.size() < num_candidates) {
            Eigen::VectorXd padded = Eigen::VectorXd::Zero(num_candidates);
            padded.head(ans.scores.size()) = ans.scores;
            ans.scores = std::move(padded);
        }
        std::unordered_set<EntityId> filter_out;
        if (const auto* tails = filter.tails(h, r)) {
            filter_out.insert(tails->begin(), tails->end());
        }
        filter_out.erase(target);

        QueryOutcome& out = outcomes[qi];
        out.rank = expected_rank(ans.scores, target, filter_out);
        out.inverse_dir = inverse_dir;
        out.fallback = ans.used_fallback;
    });

    Metrics m;
    auto add = [](DirectionMetrics& d, double rank) {
        d.mrr += 1.0 / rank;
        d.hits1 += rank <= 1.0 ? 1.0 : 0.0;
        d.hits10 += rank <= 10.0 ? 1.0 : 0.0;
        d.num_queries += 1;
    };
    for (const auto& out : outcomes) {
        add(out.inverse_dir ? m.inverse : m.forward, out.rank);
        if (out.fallback) ++m.fallback_count;
    }
    m.num_queries = m.forward.num_queries + m.inverse.num_queries;
    m.mrr = m.forward.mrr + m.inverse.mrr;
    m.hits1 = m.forward.hits1 + m.inverse.hits1;
    m.hits10 = m.forward.hits10 + m.inverse.hits10;
    auto normalize = [](DirectionMetrics& d) {
        if (d.num_queries == 0) return;
        d.mrr /= static_cast<double>(d.num_queries);
        d.hits1 /= static_cast<double>(d.num_queries);
        d.hits10 /= static_cast<double>(d.num_queries);
    };
    normalize(m.forward);
    normalize(m.inverse);
    if (m.num_queries > 0) {
        m.mrr /= static_cast<double>(m.num_queries);
        m.hits1 /= static_cast<double>(m.num_queries);
        m.hits10 /= static_cast<double>(m.num_queries);
    }
    return m;
}

std::string format_metrics(const Metrics& m) {
    char buf[512];
    std::string out;
    std::snprintf(buf, sizeof(buf), "queries\t%lld\nfallback_queries\t%lld\n", static_cast<long long>(m.num_queries),
                  static_cast<long long>(m.fallback_count));
    out += buf;
    std::snprintf(buf, sizeof(buf), "mrr\t%.6f\nhits@1\t%.6f\nhits@10\t%.6f\n", m.mrr, m.hits1, m.hits10);
    out += buf;
    std::snprintf(buf, sizeof(buf), "forward_mrr\t%.6f\nforward_hits@1\t%.6f\nforward_hits@10\t%.6f\n", m.forward.mrr,
                  m.forward.hits1, m.forward.hits10);
    out += buf;
    std::snprintf(buf, sizeof(buf), "inverse_mrr\t%.6f\ninverse_hits@1\t%.6f\ninverse_hits@10\t%.6f\n", m.inverse.mrr,
                  m.inverse.hits1, m.inverse.hits10);
    out += buf;
    return out;
}

}  // namespace slogic
