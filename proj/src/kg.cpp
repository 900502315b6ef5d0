#include "slogic/kg.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>

namespace slogic {

namespace {

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

LoadedTriples load_triples(const std::string& path, const Vocabulary* existing) {
    std::ifstream in(path);
    if (!in) throw UserError("cannot open triple file: " + path);

    LoadedTriples out;
    if (existing) out.vocab = *existing;
    const bool fixed_relations = existing != nullptr;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        const auto tab1 = line.find('\t');
        const auto tab2 = tab1 == std::string::npos ? std::string::npos : line.find('\t', tab1 + 1);
        const auto tab3 = tab2 == std::string::npos ? std::string::npos : line.find('\t', tab2 + 1);
        if (tab1 == std::string::npos || tab2 == std::string::npos || tab3 != std::string::npos) {
            throw UserError(path + ":" + std::to_string(line_no) + ": expected 3 tab-separated fields");
        }
        const std::string head = line.substr(0, tab1);
        const std::string rel = line.substr(tab1 + 1, tab2 - tab1 - 1);
        const std::string tail = line.substr(tab2 + 1);

        RelationId r;
        if (fixed_relations) {
            auto id = out.vocab.relation_id(rel);
            if (!id) {
                throw UserError(path + ":" + std::to_string(line_no) + ": unknown relation '" + rel +
                                "' under fixed vocabulary");
            }
            r = *id;
        } else {
            r = out.vocab.add_relation(rel);
        }
        out.triples.push_back({out.vocab.add_entity(head), r, out.vocab.add_entity(tail)});
    }
    return out;
}

KnowledgeGraph build_graph(const std::vector<Triple>& triples, Vocabulary vocab) {
    KnowledgeGraph g;
    g.num_entities = static_cast<int>(vocab.num_entities());
    g.num_relations_orig = static_cast<int>(vocab.num_relations());
    g.vocab = std::move(vocab);

    // Dedup originals, keeping first-seen order.
    std::unordered_set<Triple, TripleHash> seen;
    g.triples.reserve(triples.size());
    for (const Triple& t : triples) {
        if (t.head < 0 || t.head >= g.num_entities || t.tail < 0 || t.tail >= g.num_entities || t.relation < 0 ||
            t.relation >= g.num_relations_orig) {
            throw UserError("triple id out of vocabulary bounds");
        }
        if (seen.insert(t).second) g.triples.push_back(t);
    }

    const int num_aug = g.num_relations_aug();
    std::vector<std::vector<std::pair<EntityId, EntityId>>> per_rel(static_cast<std::size_t>(num_aug));
    g.global_degree.assign(static_cast<std::size_t>(g.num_entities), 0);
    for (const Triple& t : g.triples) {
        per_rel[static_cast<std::size_t>(t.relation)].emplace_back(t.head, t.tail);
        per_rel[static_cast<std::size_t>(t.relation + g.num_relations_orig)].emplace_back(t.tail, t.head);
        g.global_degree[static_cast<std::size_t>(t.head)] += 1;
        g.global_degree[static_cast<std::size_t>(t.tail)] += 1;
    }
    g.adjacency.reserve(static_cast<std::size_t>(num_aug));
    for (auto& pairs : per_rel) {
        g.adjacency.push_back(CsrBool::from_pairs(g.num_entities, g.num_entities, std::move(pairs)));
    }

    // Flat augmented out-edge index.
    std::vector<std::vector<std::pair<EntityId, RelationId>>> per_node(static_cast<std::size_t>(g.num_entities));
    for (int r = 0; r < num_aug; ++r) {
        const auto& adj = g.adjacency[static_cast<std::size_t>(r)];
        for (int v = 0; v < g.num_entities; ++v) {
            for (EntityId u : adj.row(v)) per_node[static_cast<std::size_t>(v)].emplace_back(u, r);
        }
    }
    g.edge_ptr.assign(static_cast<std::size_t>(g.num_entities) + 1, 0);
    for (int v = 0; v < g.num_entities; ++v) {
        auto& es = per_node[static_cast<std::size_t>(v)];
        std::sort(es.begin(), es.end());
        g.edge_ptr[static_cast<std::size_t>(v) + 1] = g.edge_ptr[static_cast<std::size_t>(v)] + static_cast<std::int64_t>(es.size());
        g.edges.insert(g.edges.end(), es.begin(), es.end());
    }
    return g;
}

std::vector<EntityId> KnowledgeGraph::neighbors(EntityId v) const {
    std::vector<EntityId> out;
    EntityId last = -1;
    for (const auto& [u, r] : out_edges(v)) {
        (void)r;
        if (u != last) {
            out.push_back(u);
            last = u;
        }
    }
    return out;
}

std::vector<RelationId> KnowledgeGraph::relations_between(EntityId v, EntityId u) const {
    std::vector<RelationId> out;
    const auto es = out_edges(v);
    auto it = std::lower_bound(es.begin(), es.end(), std::make_pair(u, RelationId{0}));
    for (; it != es.end() && it->first == u; ++it) out.push_back(it->second);
    return out;
}

std::unordered_set<EntityId> known_tails(const KnowledgeGraph& g, EntityId h, RelationId r,
                                         std::span<const std::vector<Triple>> splits) {
    std::unordered_set<EntityId> out;
    const bool is_inverse = r >= g.num_relations_orig;
    const RelationId orig = is_inverse ? r - g.num_relations_orig : r;
    for (const auto& split : splits) {
        for (const Triple& t : split) {
            if (t.relation != orig) continue;
            if (!is_inverse && t.head == h) out.insert(t.tail);
            if (is_inverse && t.tail == h) out.insert(t.head);
        }
    }
    return out;
}

TailFilter::TailFilter(const KnowledgeGraph& g, std::span<const std::vector<Triple>> splits)
    : num_relations_aug_(g.num_relations_aug()) {
    for (const auto& split : splits) {
        for (const Triple& t : split) {
            map_[key(t.head, t.relation)].push_back(t.tail);
            map_[key(t.tail, t.relation + g.num_relations_orig)].push_back(t.head);
        }
    }
    for (auto& [k, v] : map_) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }
}

namespace {

constexpr std::uint32_t kCacheMagic = 0x534c4b47;  // "SLKG"
constexpr std::uint32_t kCacheVersion = 1;

template <typename T>
void write_pod(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw UserError("graph cache truncated");
    return v;
}

void write_string(std::ofstream& out, const std::string& s) {
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_string(std::ifstream& in) {
    const auto n = read_pod<std::uint32_t>(in);
    std::string s(n, '\0');
    in.read(s.data(), n);
    if (!in) throw UserError("graph cache truncated");
    return s;
}

}  // namespace

void KnowledgeGraph::save_cache(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw UserError("cannot write graph cache: " + path);
    write_pod(out, kCacheMagic);
    write_pod(out, kCacheVersion);
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(vocab.num_entities()));
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(vocab.num_relations()));
    for (const auto& name : vocab.entity_names()) write_string(out, name);
    for (const auto& name : vocab.relation_names()) write_string(out, name);
    write_pod<std::uint64_t>(out, triples.size());
    for (const Triple& t : triples) {
        write_pod(out, t.head);
        write_pod(out, t.relation);
        write_pod(out, t.tail);
    }
}

KnowledgeGraph KnowledgeGraph::load_cache(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UserError("cannot open graph cache: " + path);
    if (read_pod<std::uint32_t>(in) != kCacheMagic) throw UserError("not a graph cache file: " + path);
    if (read_pod<std::uint32_t>(in) != kCacheVersion) throw UserError("unsupported graph cache version: " + path);
    const auto ne = read_pod<std::uint32_t>(in);
    const auto nr = read_pod<std::uint32_t>(in);
    Vocabulary vocab;
    for (std::uint32_t i = 0; i < ne; ++i) vocab.add_entity(read_string(in));
    for (std::uint32_t i = 0; i < nr; ++i) vocab.add_relation(read_string(in));
    const auto nt = read_pod<std::uint64_t>(in);
    std::vector<Triple> triples;
    triples.reserve(nt);
    for (std::uint64_t i = 0; i < nt; ++i) {
        Triple t;
        t.head = read_pod<EntityId>(in);
        t.relation = read_pod<RelationId>(in);
        t.tail = read_pod<EntityId>(in);
        triples.push_back(t);
    }
    return build_graph(triples, std::move(vocab));
}

}  // namespace slogic
