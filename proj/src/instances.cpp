#include "slogic/instances.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "slogic/rng.hpp"
#include "slogic/util.hpp"

namespace slogic {

namespace {

// Frontier after walking `body` from h, with the directed edges
// (mask_h, mask_r, mask_t) and its inverse unavailable. Empty body is a
// contract violation.
std::vector<EntityId> walk_body(const KnowledgeGraph& g, EntityId h, std::span<const RelationId> body,
                                SparseScratch& scratch, EntityId mask_h = -1, RelationId mask_r = -1,
                                EntityId mask_t = -1) {
    if (body.empty()) throw std::invalid_argument("rule body must be non-empty");
    std::vector<EntityId> frontier{h};
    for (RelationId rel : body) {
        EntityId ms = -1, md = -1;
        if (mask_h >= 0) {
            if (rel == mask_r) {
                ms = mask_h;
                md = mask_t;
            } else if (rel == g.inverse(mask_r)) {
                ms = mask_t;
                md = mask_h;
            }
        }
        frontier = bool_propagate(g.adjacency[static_cast<std::size_t>(rel)], frontier, scratch, ms, md);
        if (frontier.empty()) break;
    }
    return frontier;
}

bool reaches(const std::vector<EntityId>& frontier, EntityId t) {
    return std::binary_search(frontier.begin(), frontier.end(), t);
}

}  // namespace

bool locally_applicable(const KnowledgeGraph& g, EntityId h, const std::vector<RelationId>& body) {
    SparseScratch scratch;
    return !walk_body(g, h, body, scratch).empty();
}

namespace {

struct QueryWork {
    const KnowledgeGraph& g;
    const RuleBase& rb;
    SparseScratch scratch;

    // Bodies for r that reach t from h under the mask, rule-index order.
    std::vector<std::int32_t> positive_candidates(EntityId h, RelationId r, EntityId t) {
        std::vector<std::int32_t> out;
        for (std::int32_t idx : rb.for_head(r)) {
            const auto& body = rb.rules()[static_cast<std::size_t>(idx)].first.body;
            const auto frontier = walk_body(g, h, body, scratch, h, r, t);
            if (reaches(frontier, t)) out.push_back(idx);
        }
        return out;
    }

    // Top-K applicable pool minus bodies reaching t, rule-index order.
    std::vector<std::int32_t> negative_pool(EntityId h, RelationId r, EntityId t, int pool_size) {
        std::vector<std::int32_t> out;
        int in_pool = 0;
        for (std::int32_t idx : rb.for_head(r)) {
            if (in_pool >= pool_size) break;
            const auto& body = rb.rules()[static_cast<std::size_t>(idx)].first.body;
            const auto frontier = walk_body(g, h, body, scratch, h, r, t);
            if (frontier.empty()) continue;  // not locally applicable
            ++in_pool;
            if (!reaches(frontier, t)) out.push_back(idx);
        }
        return out;
    }
};

std::vector<std::vector<RelationId>> pick_bodies(const RuleBase& rb, const std::vector<std::int32_t>& candidates,
                                                 std::size_t k, Rng& rng) {
    auto chosen = rng.sample_indices(candidates.size(), k);
    std::sort(chosen.begin(), chosen.end());  // keep rule-index order in output
    std::vector<std::vector<RelationId>> out;
    out.reserve(chosen.size());
    for (auto c : chosen) out.push_back(rb.rules()[static_cast<std::size_t>(candidates[c])].first.body);
    return out;
}

}  // namespace

std::vector<std::vector<RelationId>> positive_bodies(const KnowledgeGraph& g, EntityId h, RelationId r, EntityId t,
                                                     const RuleBase& rule_base, int k_pos, std::uint64_t seed) {
    QueryWork work{g, rule_base, {}};
    Rng rng(seed);
    return pick_bodies(rule_base, work.positive_candidates(h, r, t), static_cast<std::size_t>(k_pos), rng);
}

std::vector<std::vector<RelationId>> hard_negatives(const KnowledgeGraph& g, EntityId h, RelationId r, EntityId t,
                                                    const RuleBase& rule_base, const NegativePoolConfig& cfg) {
    QueryWork work{g, rule_base, {}};
    Rng rng(cfg.seed);
    return pick_bodies(rule_base, work.negative_pool(h, r, t, cfg.pool_size), static_cast<std::size_t>(cfg.k_neg), rng);
}

GenerateStats generate(const KnowledgeGraph& g, const RuleBase& rule_base, const GenerateConfig& cfg,
                       const std::function<void(const TrainingRecord&)>& sink) {
    const std::size_t num_queries = g.triples.size() * 2;
    GenerateStats stats;
    stats.queries = static_cast<std::int64_t>(num_queries);

    // Windowed so the full instance set (roughly k_pos * k_neg per triple)
    // is never resident at once; within a window the per-query seed keeps
    // output independent of the thread count.
    constexpr std::size_t kWindow = 4096;
    std::vector<std::vector<TrainingRecord>> window(std::min(kWindow, std::max<std::size_t>(num_queries, 1)));
    for (std::size_t base = 0; base < num_queries; base += kWindow) {
        const std::size_t count = std::min(kWindow, num_queries - base);
        parallel_for(count, cfg.threads, [&](std::size_t w) {
            const std::size_t qi = base + w;
            const Triple& orig = g.triples[qi / 2];
            const bool inverse_dir = (qi % 2) == 1;
            const EntityId h = inverse_dir ? orig.tail : orig.head;
            const RelationId r = inverse_dir ? g.inverse(orig.relation) : orig.relation;
            const EntityId t = inverse_dir ? orig.head : orig.tail;

            window[w].clear();
            QueryWork work{g, rule_base, {}};
            Rng rng(mix_seed(cfg.seed, qi));
            const auto positives = pick_bodies(rule_base, work.positive_candidates(h, r, t),
                                               static_cast<std::size_t>(cfg.k_pos), rng);
            if (positives.empty()) return;
            const auto pool = work.negative_pool(h, r, t, cfg.pool_size);
            for (const auto& pos : positives) {
                TrainingRecord rec;
                rec.query = {h, r, t};
                rec.positive = pos;
                rec.negatives = pick_bodies(rule_base, pool, static_cast<std::size_t>(cfg.k_neg), rng);
                if (rec.negatives.empty()) continue;  // positive dropped from pairing
                window[w].push_back(std::move(rec));
            }
        });
        for (std::size_t w = 0; w < count; ++w) {
            if (!window[w].empty()) ++stats.queries_with_pairs;
            for (const auto& rec : window[w]) {
                ++stats.records;
                stats.pairs += static_cast<std::int64_t>(rec.negatives.size());
                sink(rec);
            }
        }
    }
    return stats;
}

std::vector<TrainingRecord> generate_records(const KnowledgeGraph& g, const RuleBase& rule_base,
                                             const GenerateConfig& cfg, GenerateStats* stats) {
    std::vector<TrainingRecord> out;
    auto s = generate(g, rule_base, cfg, [&](const TrainingRecord& rec) { out.push_back(rec); });
    if (stats) *stats = s;
    return out;
}

namespace {

std::string body_names(const Vocabulary& vocab, const std::vector<RelationId>& body) {
    std::string out;
    for (std::size_t i = 0; i < body.size(); ++i) {
        if (i) out += ',';
        out += vocab.relation_name(body[i]);
    }
    return out;
}

std::vector<RelationId> parse_body(const Vocabulary& vocab, const std::string& text, const std::string& where) {
    std::vector<RelationId> body;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        auto rel = vocab.parse_relation(part);
        if (!rel) throw UserError(where + ": unknown relation '" + part + "'");
        body.push_back(*rel);
    }
    if (body.empty()) throw UserError(where + ": empty rule body");
    return body;
}

}  // namespace

void write_instances_tsv(const std::string& path, const KnowledgeGraph& g, const RuleBase& rule_base,
                         const GenerateConfig& cfg, GenerateStats* stats) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw UserError("cannot write instance file: " + path);
    auto s = generate(g, rule_base, cfg, [&](const TrainingRecord& rec) {
        out << g.vocab.entity_name(rec.query.head) << '\t' << g.vocab.relation_name(rec.query.relation) << '\t'
            << g.vocab.entity_name(rec.query.tail) << '\t' << body_names(g.vocab, rec.positive) << '\t'
            << rec.negatives.size() << '\t';
        for (std::size_t i = 0; i < rec.negatives.size(); ++i) {
            if (i) out << ';';
            out << body_names(g.vocab, rec.negatives[i]);
        }
        out << '\n';
    });
    if (stats) *stats = s;
}

std::vector<TrainingRecord> read_instances_tsv(const std::string& path, const Vocabulary& vocab) {
    std::ifstream in(path);
    if (!in) throw UserError("cannot open instance file: " + path);
    std::vector<TrainingRecord> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::string where = path + ":" + std::to_string(line_no);
        std::stringstream ss(line);
        std::string h, r, t, pos, nneg, negs;
        if (!std::getline(ss, h, '\t') || !std::getline(ss, r, '\t') || !std::getline(ss, t, '\t') ||
            !std::getline(ss, pos, '\t') || !std::getline(ss, nneg, '\t')) {
            throw UserError(where + ": malformed instance record");
        }
        std::getline(ss, negs, '\t');
        TrainingRecord rec;
        auto he = vocab.entity_id(h);
        auto te = vocab.entity_id(t);
        auto re = vocab.parse_relation(r);
        if (!he || !te || !re) throw UserError(where + ": unknown entity or relation");
        rec.query = {*he, *re, *te};
        rec.positive = parse_body(vocab, pos, where);
        std::stringstream ns(negs);
        std::string part;
        while (std::getline(ns, part, ';')) rec.negatives.push_back(parse_body(vocab, part, where));
        if (rec.negatives.size() != static_cast<std::size_t>(std::stoll(nneg))) {
            throw UserError(where + ": negative count mismatch");
        }
        out.push_back(std::move(rec));
    }
    return out;
}

}  // namespace slogic
