#include "slogic/subgraph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <unordered_map>

#include "slogic/rng.hpp"
#include "slogic/util.hpp"

namespace slogic {

Subgraph extract_subgraph(const KnowledgeGraph& g, EntityId h, int k, int alpha, std::uint64_t seed) {
    Rng rng(seed);
    Subgraph sg;
    sg.center = h;

    std::unordered_map<EntityId, std::int32_t> local;  // global -> local id
    local.emplace(h, 0);
    sg.nodes.push_back(h);

    std::vector<std::pair<EntityId, EntityId>> traversed_pairs;
    std::vector<EntityId> frontier{h}, next;
    for (int round = 0; round < k && !frontier.empty(); ++round) {
        next.clear();
        for (EntityId v : frontier) {
            std::vector<EntityId> nbrs = g.neighbors(v);
            if (static_cast<int>(nbrs.size()) > alpha) {
                // Partial Fisher-Yates over the sorted neighbor list.
                for (int i = 0; i < alpha; ++i) {
                    const auto j = static_cast<std::size_t>(i) + rng.bounded(nbrs.size() - static_cast<std::size_t>(i));
                    std::swap(nbrs[static_cast<std::size_t>(i)], nbrs[j]);
                }
                nbrs.resize(static_cast<std::size_t>(alpha));
                std::sort(nbrs.begin(), nbrs.end());
            }
            for (EntityId u : nbrs) {
                traversed_pairs.emplace_back(v, u);
                if (!local.contains(u)) {
                    local.emplace(u, static_cast<std::int32_t>(sg.nodes.size()));
                    sg.nodes.push_back(u);
                    next.push_back(u);
                }
            }
        }
        frontier.swap(next);
    }

    // Materialize every parallel edge over the traversed pairs, both
    // orientations; the augmented graph is closed under inversion so both
    // directions exist whenever either does.
    std::sort(traversed_pairs.begin(), traversed_pairs.end());
    traversed_pairs.erase(std::unique(traversed_pairs.begin(), traversed_pairs.end()), traversed_pairs.end());
    for (const auto& [v, u] : traversed_pairs) {
        const auto lv = local.at(v);
        const auto lu = local.at(u);
        for (RelationId r : g.relations_between(v, u)) sg.edges.push_back({lv, r, lu});
        if (u != v) {
            for (RelationId r : g.relations_between(u, v)) sg.edges.push_back({lu, r, lv});
        }
    }
    std::sort(sg.edges.begin(), sg.edges.end());
    sg.edges.erase(std::unique(sg.edges.begin(), sg.edges.end()), sg.edges.end());

    // Features. Distances are BFS inside the extracted subgraph; sampling
    // can add shortcuts between earlier-discovered nodes, so discovery depth
    // is not reused here.
    const auto n = sg.nodes.size();
    std::vector<std::vector<std::int32_t>> adj(n);
    for (const auto& e : sg.edges) adj[static_cast<std::size_t>(e.src)].push_back(e.dst);
    std::vector<double> dist(n, -1.0);
    std::deque<std::int32_t> queue;
    dist[0] = 0.0;
    queue.push_back(0);
    while (!queue.empty()) {
        const auto v = queue.front();
        queue.pop_front();
        for (auto u : adj[static_cast<std::size_t>(v)]) {
            if (dist[static_cast<std::size_t>(u)] < 0) {
                dist[static_cast<std::size_t>(u)] = dist[static_cast<std::size_t>(v)] + 1.0;
                queue.push_back(u);
            }
        }
    }

    sg.features.resize(static_cast<Eigen::Index>(n), 4);
    for (std::size_t i = 0; i < n; ++i) {
        const bool is_head = i == 0;
        sg.features(static_cast<Eigen::Index>(i), 0) = is_head ? 1.0 : 0.0;
        sg.features(static_cast<Eigen::Index>(i), 1) = is_head ? 0.0 : 1.0;
        sg.features(static_cast<Eigen::Index>(i), 2) = dist[i];
        sg.features(static_cast<Eigen::Index>(i), 3) =
            std::log1p(static_cast<double>(g.global_degree[static_cast<std::size_t>(sg.nodes[i])]));
    }
    return sg;
}

Subgraph remove_target_edge(const Subgraph& sg, const KnowledgeGraph& g, EntityId h, RelationId r, EntityId t) {
    Subgraph out = sg;
    const RelationId inv = g.inverse(r);
    out.edges.erase(std::remove_if(out.edges.begin(), out.edges.end(),
                                   [&](const Subgraph::Edge& e) {
                                       const EntityId src = sg.nodes[static_cast<std::size_t>(e.src)];
                                       const EntityId dst = sg.nodes[static_cast<std::size_t>(e.dst)];
                                       return (src == h && e.rel == r && dst == t) ||
                                              (src == t && e.rel == inv && dst == h);
                                   }),
                    out.edges.end());
    return out;
}

SubgraphStore extract_all(const KnowledgeGraph& g, int k, int alpha, std::uint64_t seed, int threads) {
    std::vector<Subgraph> subgraphs(static_cast<std::size_t>(g.num_entities));
    parallel_for(subgraphs.size(), threads, [&](std::size_t i) {
        subgraphs[i] = extract_subgraph(g, static_cast<EntityId>(i), k, alpha, mix_seed(seed, i));
    });
    return SubgraphStore(std::move(subgraphs));
}

namespace {

constexpr std::uint32_t kStoreMagic = 0x534c5347;  // "SLSG"
constexpr std::uint32_t kStoreVersion = 1;

template <typename T>
void write_pod(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw UserError("subgraph store truncated");
    return v;
}

}  // namespace

void SubgraphStore::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw UserError("cannot write subgraph store: " + path);
    write_pod(out, kStoreMagic);
    write_pod(out, kStoreVersion);
    write_pod<std::uint64_t>(out, subgraphs_.size());
    for (const Subgraph& sg : subgraphs_) {
        write_pod<EntityId>(out, sg.center);
        write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(sg.nodes.size()));
        out.write(reinterpret_cast<const char*>(sg.nodes.data()),
                  static_cast<std::streamsize>(sg.nodes.size() * sizeof(EntityId)));
        write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(sg.edges.size()));
        out.write(reinterpret_cast<const char*>(sg.edges.data()),
                  static_cast<std::streamsize>(sg.edges.size() * sizeof(Subgraph::Edge)));
        for (Eigen::Index i = 0; i < sg.features.rows(); ++i) {
            for (Eigen::Index j = 0; j < 4; ++j) write_pod<double>(out, sg.features(i, j));
        }
    }
}

SubgraphStore SubgraphStore::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UserError("cannot open subgraph store: " + path);
    if (read_pod<std::uint32_t>(in) != kStoreMagic) throw UserError("not a subgraph store: " + path);
    if (read_pod<std::uint32_t>(in) != kStoreVersion) throw UserError("unsupported subgraph store version: " + path);
    const auto count = read_pod<std::uint64_t>(in);
    std::vector<Subgraph> subgraphs(count);
    for (auto& sg : subgraphs) {
        sg.center = read_pod<EntityId>(in);
        const auto nn = read_pod<std::uint32_t>(in);
        sg.nodes.resize(nn);
        in.read(reinterpret_cast<char*>(sg.nodes.data()), static_cast<std::streamsize>(nn * sizeof(EntityId)));
        const auto ne = read_pod<std::uint32_t>(in);
        sg.edges.resize(ne);
        in.read(reinterpret_cast<char*>(sg.edges.data()), static_cast<std::streamsize>(ne * sizeof(Subgraph::Edge)));
        sg.features.resize(static_cast<Eigen::Index>(nn), 4);
        for (Eigen::Index i = 0; i < sg.features.rows(); ++i) {
            for (Eigen::Index j = 0; j < 4; ++j) sg.features(i, j) = read_pod<double>(in);
        }
        if (!in) throw UserError("subgraph store truncated");
    }
    return SubgraphStore(std::move(subgraphs));
}

}  // namespace slogic
