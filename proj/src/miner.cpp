#include "slogic/miner.hpp"

#include <algorithm>
#include <cassert>
#include <map>

#include "slogic/rng.hpp"
#include "slogic/util.hpp"

namespace slogic {

namespace {

// Masked edge pair for one triple: (h,r,t) and (t,inv r,h).
struct EdgeMask {
    Triple fwd{-1, -1, -1};
    Triple bwd{-1, -1, -1};

    bool blocks(EntityId u, RelationId r, EntityId v) const {
        return (u == fwd.head && r == fwd.relation && v == fwd.tail) ||
               (u == bwd.head && r == bwd.relation && v == bwd.tail);
    }
};

EdgeMask make_mask(const KnowledgeGraph& g, const Triple& t) {
    return {t, {t.tail, g.inverse(t.relation), t.head}};
}

// BFS distances to `t` over reversed augmented edges, capped at max_len.
// Reversal uses the inverse-closure: dist(u -> t) steps along edges
// (x, r, u) i.e. out-edges of u relabelled, so we walk u's out-edges and
// check the mask on the forward orientation.
void distances_to(const KnowledgeGraph& g, EntityId t, int max_len, const EdgeMask& mask, std::vector<int>& dist) {
    dist.assign(static_cast<std::size_t>(g.num_entities), -1);
    dist[static_cast<std::size_t>(t)] = 0;
    std::vector<EntityId> frontier{t}, next;
    for (int d = 1; d <= max_len && !frontier.empty(); ++d) {
        next.clear();
        for (EntityId v : frontier) {
            for (const auto& [u, r] : g.out_edges(v)) {
                // Edge (u, inv r, v) in forward orientation.
                if (mask.blocks(u, g.inverse(r), v)) continue;
                if (dist[static_cast<std::size_t>(u)] < 0) {
                    dist[static_cast<std::size_t>(u)] = d;
                    next.push_back(u);
                }
            }
        }
        frontier.swap(next);
    }
}

struct PathDfs {
    const KnowledgeGraph& g;
    EntityId target;
    int max_len;
    const EdgeMask& mask;
    const std::vector<int>& dist_to_target;
    std::vector<char> on_path;
    std::vector<RelationId> labels;
    std::set<std::vector<RelationId>> found;

    void run(EntityId v, int depth) {
        for (const auto& [u, r] : g.out_edges(v)) {
            if (mask.blocks(v, r, u)) continue;
            if (u == target) {
                labels.push_back(r);
                found.insert(labels);
                labels.pop_back();
            }
            if (depth + 1 >= max_len) continue;
            if (on_path[static_cast<std::size_t>(u)] || u == target) continue;
            const int dt = dist_to_target[static_cast<std::size_t>(u)];
            if (dt < 0 || depth + 1 + dt > max_len) continue;
            on_path[static_cast<std::size_t>(u)] = 1;
            labels.push_back(r);
            run(u, depth + 1);
            labels.pop_back();
            on_path[static_cast<std::size_t>(u)] = 0;
        }
    }
};

std::set<std::vector<RelationId>> simple_paths_masked(const KnowledgeGraph& g, EntityId h, EntityId t, int max_len,
                                                      const EdgeMask& mask, std::vector<int>& dist_scratch) {
    std::set<std::vector<RelationId>> out;
    if (h == t || max_len < 1) return out;  // no repeated nodes, so no h -> h paths
    distances_to(g, t, max_len, mask, dist_scratch);
    if (dist_scratch[static_cast<std::size_t>(h)] < 0) return out;
    PathDfs dfs{g, t, max_len, mask, dist_scratch, std::vector<char>(static_cast<std::size_t>(g.num_entities), 0), {}, {}};
    dfs.on_path[static_cast<std::size_t>(h)] = 1;
    dfs.run(h, 0);
    return dfs.found;
}

std::vector<RelationId> reversed_inverted(const KnowledgeGraph& g, const std::vector<RelationId>& body) {
    std::vector<RelationId> out(body.size());
    for (std::size_t i = 0; i < body.size(); ++i) out[out.size() - 1 - i] = g.inverse(body[i]);
    return out;
}

}  // namespace

std::set<std::vector<RelationId>> enumerate_simple_paths(const KnowledgeGraph& g, EntityId h, EntityId t, int max_len,
                                                         const std::optional<Triple>& excluded) {
    EdgeMask mask;
    if (excluded) mask = make_mask(g, *excluded);
    std::vector<int> dist;
    return simple_paths_masked(g, h, t, max_len, mask, dist);
}

CandidateCounts mine_rules(const KnowledgeGraph& g, int max_len, double sample_fraction, std::uint64_t seed,
                           int threads) {
    if (sample_fraction <= 0.0 || sample_fraction > 1.0) throw UserError("sample_fraction must be in (0, 1]");

    // Sample triple indices up front so results are thread-count independent.
    std::vector<std::size_t> picked(g.triples.size());
    for (std::size_t i = 0; i < picked.size(); ++i) picked[i] = i;
    if (sample_fraction < 1.0) {
        const auto k = static_cast<std::size_t>(static_cast<double>(picked.size()) * sample_fraction + 0.5);
        Rng rng(seed);
        picked = rng.sample_indices(picked.size(), k);
        std::sort(picked.begin(), picked.end());
    }

    std::vector<CandidateCounts> partial(picked.size() == 0 ? 1 : std::min<std::size_t>(picked.size(), 64));
    const std::size_t shards = partial.size();
    parallel_for(shards, threads, [&](std::size_t shard) {
        std::vector<int> dist;
        CandidateCounts& local = partial[shard];
        for (std::size_t i = shard; i < picked.size(); i += shards) {
            const Triple& triple = g.triples[picked[i]];
            const EdgeMask mask = make_mask(g, triple);
            auto bodies = simple_paths_masked(g, triple.head, triple.tail, max_len, mask, dist);
            const RelationId inv_head = g.inverse(triple.relation);
            for (const auto& body : bodies) {
                local[Rule{triple.relation, body}] += 1;
                // The inverse query (t, inv r, h) sees exactly the reversed,
                // inverted bodies; same masked edge pair, so no second DFS.
                local[Rule{inv_head, reversed_inverted(g, body)}] += 1;
            }
        }
    });

    CandidateCounts merged;
    for (auto& part : partial) {
        for (auto& [rule, count] : part) merged[rule] += count;
    }
    return merged;
}

namespace {

CsrBool chain_product(const KnowledgeGraph& g, std::span<const RelationId> body) {
    CsrBool acc = g.adjacency[static_cast<std::size_t>(body[0])];
    for (std::size_t i = 1; i < body.size(); ++i) {
        acc = acc.multiply(g.adjacency[static_cast<std::size_t>(body[i])]);
    }
    return acc;
}

}  // namespace

std::int64_t body_count(const KnowledgeGraph& g, const std::vector<RelationId>& body) {
    if (body.empty()) throw std::invalid_argument("body must be non-empty");
    return chain_product(g, body).nnz();
}

std::int64_t support(const KnowledgeGraph& g, const std::vector<RelationId>& body, RelationId head_relation) {
    if (body.empty()) throw std::invalid_argument("body must be non-empty");
    return chain_product(g, body).and_count(g.adjacency[static_cast<std::size_t>(head_relation)]);
}

RuleBase build_rule_base(const CandidateCounts& candidates, const KnowledgeGraph& g, const RuleBaseConfig& cfg) {
    // Group head relations by body so each chain product is computed once,
    // and sort bodies lexicographically so neighbouring bodies share prefix
    // products within a chunk.
    std::map<std::vector<RelationId>, std::vector<RelationId>> heads_by_body;
    for (const auto& [rule, count] : candidates) {
        (void)count;
        heads_by_body[rule.body].push_back(rule.head);
    }
    std::vector<std::pair<std::vector<RelationId>, std::vector<RelationId>>> groups;
    groups.reserve(heads_by_body.size());
    for (auto& [body, heads] : heads_by_body) {
        std::sort(heads.begin(), heads.end());
        groups.emplace_back(body, heads);
    }

    struct GroupResult {
        std::int64_t body_count = 0;
        std::vector<std::int64_t> supports;
    };
    std::vector<GroupResult> results(groups.size());

    const std::size_t chunk = 64;  // prefix-product reuse window
    const std::size_t num_chunks = (groups.size() + chunk - 1) / chunk;
    parallel_for(num_chunks, cfg.threads, [&](std::size_t c) {
        std::vector<std::pair<std::vector<RelationId>, CsrBool>> stack;  // prefix products
        const std::size_t begin = c * chunk;
        const std::size_t end = std::min(groups.size(), begin + chunk);
        for (std::size_t i = begin; i < end; ++i) {
            const auto& body = groups[i].first;
            // Pop stack to the longest prefix of `body`.
            while (!stack.empty()) {
                const auto& pfx = stack.back().first;
                if (pfx.size() <= body.size() && std::equal(pfx.begin(), pfx.end(), body.begin())) break;
                stack.pop_back();
            }
            std::size_t from = stack.empty() ? 0 : stack.back().first.size();
            while (from < body.size()) {
                CsrBool next = (from == 0) ? g.adjacency[static_cast<std::size_t>(body[0])]
                                           : stack.back().second.multiply(g.adjacency[static_cast<std::size_t>(body[from])]);
                stack.emplace_back(std::vector<RelationId>(body.begin(), body.begin() + static_cast<std::ptrdiff_t>(from) + 1),
                                   std::move(next));
                ++from;
            }
            const CsrBool& product = stack.back().second;
            GroupResult& res = results[i];
            res.body_count = product.nnz();
            res.supports.reserve(groups[i].second.size());
            for (RelationId head : groups[i].second) {
                res.supports.push_back(product.and_count(g.adjacency[static_cast<std::size_t>(head)]));
            }
        }
    });

    std::vector<std::pair<Rule, RuleStats>> rules;
    for (std::size_t i = 0; i < groups.size(); ++i) {
        const auto& [body, heads] = groups[i];
        const GroupResult& res = results[i];
        if (res.body_count < cfg.min_body_count) continue;
        for (std::size_t j = 0; j < heads.size(); ++j) {
            RuleStats s;
            s.support = res.supports[j];
            s.body_count = res.body_count;
            s.confidence = res.body_count > 0 ? static_cast<double>(s.support) / static_cast<double>(s.body_count) : 0.0;
            s.laplace = static_cast<double>(s.support + 1) / static_cast<double>(s.body_count + 2);
            s.z = cfg.z;
            s.wilson = wilson_lower(s.confidence, s.body_count, cfg.z);
            rules.emplace_back(Rule{heads[j], body}, s);
        }
    }
    return RuleBase(std::move(rules), g.num_relations_aug());
}

}  // namespace slogic
