#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "slogic/kg.hpp"

namespace slogic {

// k-hop sampled neighborhood of a center entity. Local node ids index
// `nodes`; local 0 is the center. Features per node: [head one-hot (2),
// BFS distance from the center inside this subgraph, ln(1 + global degree)].
struct Subgraph {
    EntityId center = -1;
    std::vector<EntityId> nodes;  // global ids, nodes[0] == center

    struct Edge {
        std::int32_t src;
        RelationId rel;
        std::int32_t dst;

        friend bool operator==(const Edge&, const Edge&) = default;
        friend auto operator<=>(const Edge&, const Edge&) = default;
    };
    std::vector<Edge> edges;  // local ids

    Eigen::MatrixXd features;  // |nodes| x 4

    std::size_t num_nodes() const { return nodes.size(); }
};

// Seeded BFS expansion from h, k rounds over both edge directions; when a
// node has more than `alpha` distinct neighbors, exactly alpha are kept
// (uniform, without replacement). All parallel edges between a traversed
// node pair enter the subgraph, both orientations.
Subgraph extract_subgraph(const KnowledgeGraph& g, EntityId h, int k, int alpha, std::uint64_t seed);

// Copy with every edge matching (h, r, t) or its inverse removed; nodes and
// features unchanged.
Subgraph remove_target_edge(const Subgraph& sg, const KnowledgeGraph& g, EntityId h, RelationId r, EntityId t);

class SubgraphStore {
public:
    SubgraphStore() = default;
    explicit SubgraphStore(std::vector<Subgraph> subgraphs) : subgraphs_(std::move(subgraphs)) {}

    const Subgraph& at(EntityId e) const { return subgraphs_.at(static_cast<std::size_t>(e)); }
    std::size_t size() const { return subgraphs_.size(); }

    void save(const std::string& path) const;
    static SubgraphStore load(const std::string& path);

private:
    std::vector<Subgraph> subgraphs_;
};

// One subgraph per entity; entity i uses the derived seed mix(seed, i), so
// extraction order and thread count cannot change the result.
SubgraphStore extract_all(const KnowledgeGraph& g, int k, int alpha, std::uint64_t seed, int threads = 1);

}  // namespace slogic
