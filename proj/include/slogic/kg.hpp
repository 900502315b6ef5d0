#pragma once

#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "slogic/sparse.hpp"
#include "slogic/types.hpp"

namespace slogic {

// Multi-relational graph over dense ids, augmented with inverse relations:
// each original triple (h, r, t) also appears as (t, inv(r), h) with
// inv(r) = r + num_relations_orig. Immutable after build_graph.
struct KnowledgeGraph {
    Vocabulary vocab;
    int num_entities = 0;
    int num_relations_orig = 0;
    std::vector<Triple> triples;          // distinct originals, first-seen order
    std::vector<CsrBool> adjacency;       // one per augmented relation
    std::vector<std::int64_t> global_degree;  // in+out over original edges only

    // Out-edges of the augmented graph, per entity, sorted by (neighbor,
    // relation). Incoming original edges appear here with inverse labels,
    // so this single index covers both directions.
    std::vector<std::int64_t> edge_ptr;
    std::vector<std::pair<EntityId, RelationId>> edges;

    int num_relations_aug() const { return 2 * num_relations_orig; }

    RelationId inverse(RelationId r) const {
        return r < num_relations_orig ? r + num_relations_orig : r - num_relations_orig;
    }

    std::span<const std::pair<EntityId, RelationId>> out_edges(EntityId v) const {
        return {edges.data() + edge_ptr[static_cast<std::size_t>(v)],
                edges.data() + edge_ptr[static_cast<std::size_t>(v) + 1]};
    }

    // Distinct neighbors of v in the augmented graph, ascending.
    std::vector<EntityId> neighbors(EntityId v) const;

    // All augmented relations labelling an edge v -> u, ascending.
    std::vector<RelationId> relations_between(EntityId v, EntityId u) const;

    bool has_edge(EntityId h, RelationId r, EntityId t) const {
        return adjacency[static_cast<std::size_t>(r)].has(h, t);
    }

    void save_cache(const std::string& path) const;
    static KnowledgeGraph load_cache(const std::string& path);
};

struct LoadedTriples {
    std::vector<Triple> triples;
    Vocabulary vocab;
};

// Parses a tab-separated "head<TAB>relation<TAB>tail" file. When a fixed
// vocabulary is given, new entities extend it (inductive test splits) but an
// unknown relation is an error.
LoadedTriples load_triples(const std::string& path, const Vocabulary* existing = nullptr);

KnowledgeGraph build_graph(const std::vector<Triple>& triples, Vocabulary vocab);

// Filtered-evaluation lookup: every t with (h, r, t) in the union of the
// given splits, honoring inverse relation ids. Splits hold original triples.
std::unordered_set<EntityId> known_tails(const KnowledgeGraph& g, EntityId h, RelationId r,
                                         std::span<const std::vector<Triple>> splits);

// Batch form of known_tails; builds the (h, r) -> tails map once.
class TailFilter {
public:
    TailFilter(const KnowledgeGraph& g, std::span<const std::vector<Triple>> splits);

    const std::vector<EntityId>* tails(EntityId h, RelationId r) const {
        auto it = map_.find(key(h, r));
        return it == map_.end() ? nullptr : &it->second;
    }

private:
    std::int64_t key(EntityId h, RelationId r) const {
        return static_cast<std::int64_t>(h) * num_relations_aug_ + r;
    }

    std::int64_t num_relations_aug_;
    std::unordered_map<std::int64_t, std::vector<EntityId>> map_;
};

}  // namespace slogic
