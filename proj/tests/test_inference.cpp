#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "slogic/inference.hpp"
#include "slogic/miner.hpp"
#include "synthetic.hpp"

using namespace slogic;

namespace {

RuleBase base_for(const KnowledgeGraph& g, int max_len = 3) {
    return build_rule_base(mine_rules(g, max_len, 1.0, 0), g, {});
}

}  // namespace

TEST_CASE("candidate_rules filters by applicability and truncates to N") {
    // Three one-hop bodies for rh from a; wilson order fixed by body counts.
    KnowledgeGraph g = synth::graph_from({
        {"a", "b0", "t"}, {"a", "b1", "u"}, {"a", "b2", "v"},
        {"x1", "b0", "y1"}, {"x1", "rh", "y1"},
        {"x2", "b1", "y2"}, {"x2", "rh", "y2"}, {"x2b", "b1", "y2b"},
        {"x3", "b2", "y3"}, {"x3", "rh", "y3"}, {"x3b", "b2", "y3b"}, {"x3c", "b2", "y3c"},
        {"a", "rh", "t"},
    });
    const RelationId rh = *g.vocab.relation_id("rh");
    RuleBase rb = base_for(g, 1);
    const EntityId a = *g.vocab.entity_id("a");

    auto top2 = candidate_rules(g, rb, a, rh, 2);
    REQUIRE(top2.size() == 2);
    CHECK(rb.rules()[static_cast<std::size_t>(top2[0])].second.wilson >=
          rb.rules()[static_cast<std::size_t>(top2[1])].second.wilson);

    // From x1 only [b0] applies.
    auto from_x1 = candidate_rules(g, rb, *g.vocab.entity_id("x1"), rh, 10);
    REQUIRE(from_x1.size() == 1);

    // No applicable rules from an entity with no matching out-edges.
    auto none = candidate_rules(g, rb, *g.vocab.entity_id("y1"), rh, 10);
    CHECK(none.empty());
}

TEST_CASE("candidate applicability matches the walk oracle") {
    for (std::uint64_t seed = 500; seed < 504; ++seed) {
        KnowledgeGraph g = synth::random_graph(seed, 25, 3);
        auto og = oracle::OracleGraph::from(g);
        RuleBase rb = base_for(g, 2);
        for (EntityId h = 0; h < g.num_entities; h += 3) {
            for (RelationId r = 0; r < g.num_relations_aug(); ++r) {
                auto cands = candidate_rules(g, rb, h, r, 1000000);
                std::size_t oracle_count = 0;
                for (std::int32_t idx : rb.for_head(r)) {
                    if (oracle::applicable(og, h, rb.rules()[static_cast<std::size_t>(idx)].first.body)) {
                        ++oracle_count;
                    }
                }
                CHECK(cands.size() == oracle_count);
            }
        }
    }
}

TEST_CASE("softmax weights: symmetry, exact values, argmax limit") {
    auto uniform = softmax_weights({1.5, 1.5, 1.5}, 0.7);
    for (double w : uniform) CHECK(w == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

    auto pair = softmax_weights({1.0, 0.0}, 0.5);
    const double e2 = std::exp(2.0);
    CHECK(pair[0] == doctest::Approx(e2 / (e2 + 1.0)).epsilon(1e-12));
    CHECK(pair[1] == doctest::Approx(1.0 / (e2 + 1.0)).epsilon(1e-12));
    CHECK(pair[0] == doctest::Approx(0.8808).epsilon(1e-4));

    // exp(-100) underflows the double gap below 1.0, so >= is the
    // representable form of the argmax-limit bound.
    auto sharp = softmax_weights({1.0, 0.0}, 0.01);
    CHECK(sharp[0] >= 1.0 - 1e-43);
    CHECK(sharp[0] + sharp[1] == doctest::Approx(1.0).epsilon(1e-15));

    double sum = 0.0;
    for (double w : softmax_weights({3.0, -2.0, 0.5, 0.5}, 2.0)) sum += w;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("softmax preserves strict score order for any temperature") {
    const std::vector<double> phis{0.3, -1.2, 2.4, 0.9};
    for (double t : {0.01, 0.5, 2.0}) {
        auto w = softmax_weights(phis, t);
        for (std::size_t i = 0; i < phis.size(); ++i) {
            for (std::size_t j = 0; j < phis.size(); ++j) {
                if (phis[i] > phis[j]) CHECK(w[i] > w[j]);
            }
        }
    }
}

TEST_CASE("ground_rule counts walks") {
    KnowledgeGraph g = synth::graph_from({{"a", "r1", "b"}, {"b", "r2", "c"}});
    auto counts = ground_rule(g, 0, {0, 1});
    REQUIRE(counts.size() == 1);
    CHECK(counts[0] == std::pair<EntityId, std::int64_t>{2, 1});

    // Diamond: two distinct walks with the same labels.
    KnowledgeGraph d = synth::graph_from({{"a", "r1", "b1"}, {"a", "r1", "b2"}, {"b1", "r2", "c"}, {"b2", "r2", "c"}});
    auto dc = ground_rule(d, 0, {0, 1});
    REQUIRE(dc.size() == 1);
    CHECK(dc[0].second == 2);

    // Saturation at the cap.
    auto capped = ground_rule(d, 0, {0, 1}, 1);
    CHECK(capped[0].second == 1);
}

TEST_CASE("grounding matches the walk-count oracle on random graphs") {
    for (std::uint64_t seed = 600; seed < 606; ++seed) {
        KnowledgeGraph g = synth::random_graph(seed, 30, 3);
        auto og = oracle::OracleGraph::from(g);
        Rng rng(seed);
        for (int trial = 0; trial < 25; ++trial) {
            const auto h = static_cast<EntityId>(rng.bounded(static_cast<std::uint64_t>(g.num_entities)));
            std::vector<RelationId> body;
            for (std::uint64_t i = 0, len = 1 + rng.bounded(3); i < len; ++i) {
                body.push_back(static_cast<RelationId>(rng.bounded(static_cast<std::uint64_t>(g.num_relations_aug()))));
            }
            auto got = ground_rule(g, h, body);
            auto want = oracle::walk_counts(og, h, body);
            REQUIRE(got.size() == want.size());
            for (const auto& [e, c] : got) {
                CHECK(want.at(e) == c);
            }
        }
    }
}

TEST_CASE("binarize squashes counts") {
    CHECK(binarize(0, 2.0) == 0.0);
    CHECK(binarize(2, 2.0) == doctest::Approx(0.76159).epsilon(1e-5));
    CHECK(binarize(1'000'000'000, 2.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(binarize(5, 1e9) < 1e-8);
}

TEST_CASE("answer_query composes weights, grounding and binarization") {
    // Single applicable rule with one path: score = tanh(1 / tau).
    KnowledgeGraph g = synth::graph_from({
        {"a", "r1", "b"}, {"b", "r2", "c"}, {"a", "rh", "c"},
        {"x", "r1", "y"}, {"y", "r2", "z"}, {"x", "rh", "z"},
    });
    const RelationId rh = *g.vocab.relation_id("rh");
    RuleBase rb = base_for(g, 2);
    InferenceConfig cfg;
    cfg.top_n = 50;
    cfg.tanh_scale = 2.0;
    AnswerVector ans = static_answer_query(g, rb, *g.vocab.entity_id("a"), rh, cfg);
    CHECK_FALSE(ans.used_fallback);
    const EntityId c = *g.vocab.entity_id("c");
    // Candidates may include [r1, r2] and longer aliases, all grounding to
    // c only; total mass stays on c and is a convex combination of
    // tanh(count / tau) values, hence positive and <= tanh-bounded.
    CHECK(ans.scores(c) > 0.0);
    for (EntityId e = 0; e < g.num_entities; ++e) {
        if (e != c) CHECK(ans.scores(e) == 0.0);
    }
    // Contributing weights sum to one.
    double sum = 0.0;
    for (const auto& w : ans.contributing) sum += w.weight;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("two-rule hand composition (Eq. 2)") {
    // Rules [p] and [q] from a: p -> t, q -> u, phi chosen via wilson gap.
    KnowledgeGraph g = synth::graph_from({
        {"a", "p", "t"}, {"a", "q", "u"},
        // stats: make [p] wilson high, [q] lower
        {"x1", "p", "y1"}, {"x1", "rh", "y1"}, {"x2", "p", "y2"}, {"x2", "rh", "y2"},
        {"x3", "q", "y3"}, {"x3", "rh", "y3"}, {"x4", "q", "y4"},
        {"a", "rh", "t"},
    });
    const RelationId rh = *g.vocab.relation_id("rh");
    RuleBase rb = base_for(g, 1);
    const RuleStats* sp = rb.find(rh, {*g.vocab.relation_id("p")});
    const RuleStats* sq = rb.find(rh, {*g.vocab.relation_id("q")});
    REQUIRE(sp != nullptr);
    REQUIRE(sq != nullptr);
    REQUIRE(sp->wilson > sq->wilson);

    InferenceConfig cfg;
    cfg.top_n = 2;
    cfg.temperature = 0.5;
    cfg.tanh_scale = 2.0;
    AnswerVector ans = static_answer_query(g, rb, *g.vocab.entity_id("a"), rh, cfg);
    auto w = softmax_weights({sp->wilson, sq->wilson}, 0.5);
    CHECK(ans.scores(*g.vocab.entity_id("t")) == doctest::Approx(w[0] * std::tanh(0.5)).epsilon(1e-12));
    CHECK(ans.scores(*g.vocab.entity_id("u")) == doctest::Approx(w[1] * std::tanh(0.5)).epsilon(1e-12));
}

TEST_CASE("positive scores imply a grounding path") {
    for (std::uint64_t seed = 700; seed < 703; ++seed) {
        KnowledgeGraph g = synth::random_graph(seed, 20, 3);
        auto og = oracle::OracleGraph::from(g);
        RuleBase rb = base_for(g, 2);
        InferenceConfig cfg;
        cfg.top_n = 5;
        for (EntityId h = 0; h < g.num_entities; h += 5) {
            for (RelationId r = 0; r < g.num_relations_orig; ++r) {
                AnswerVector ans = static_answer_query(g, rb, h, r, cfg);
                if (ans.used_fallback) continue;
                for (EntityId e = 0; e < g.num_entities; ++e) {
                    if (ans.scores(e) > 0.0) {
                        bool reachable = false;
                        for (const auto& c : ans.contributing) {
                            if (oracle::pair_connected(og, h, rb.rules()[static_cast<std::size_t>(c.rule_idx)].first.body, e)) {
                                reachable = true;
                                break;
                            }
                        }
                        CHECK(reachable);
                    }
                }
            }
        }
    }
}

TEST_CASE("argmax rule is temperature invariant") {
    KnowledgeGraph g = synth::random_graph(801, 25, 3);
    RuleBase rb = base_for(g, 2);
    InferenceConfig cfg;
    cfg.top_n = 10;
    for (EntityId h = 0; h < g.num_entities; h += 4) {
        std::int32_t best = -1;
        for (double t : {0.01, 0.5, 2.0}) {
            cfg.temperature = t;
            AnswerVector ans = static_answer_query(g, rb, h, 0, cfg);
            if (ans.contributing.empty()) continue;
            std::int32_t top = ans.contributing[0].rule_idx;
            double top_w = ans.contributing[0].weight;
            for (const auto& c : ans.contributing) {
                if (c.weight > top_w) {
                    top_w = c.weight;
                    top = c.rule_idx;
                }
            }
            if (best == -1) best = top;
            CHECK(best == top);
        }
    }
}

TEST_CASE("fallback scores count tail frequency, inverse ids count heads") {
    KnowledgeGraph g = synth::graph_from({{"a", "r", "b"}, {"c", "r", "b"}, {"a", "r", "c"}});
    auto fwd = fallback_scores(0, g.triples, g.num_entities, g.num_relations_orig);
    CHECK(fwd(*g.vocab.entity_id("b")) == 2.0);
    CHECK(fwd(*g.vocab.entity_id("c")) == 1.0);
    CHECK(fwd(*g.vocab.entity_id("a")) == 0.0);
    auto inv = fallback_scores(g.inverse(0), g.triples, g.num_entities, g.num_relations_orig);
    CHECK(inv(*g.vocab.entity_id("a")) == 2.0);
    CHECK(inv(*g.vocab.entity_id("c")) == 1.0);
}

TEST_CASE("fallback triggers for unseen heads; config switch covers empty candidates") {
    Vocabulary v;
    v.add_entity("a");
    v.add_entity("b");
    v.add_entity("isolated");
    v.add_relation("r");
    KnowledgeGraph g = build_graph({{0, 0, 1}}, std::move(v));
    RuleBase rb = base_for(g, 2);
    InferenceConfig cfg;

    AnswerVector unseen = static_answer_query(g, rb, 2, 0, cfg);
    CHECK(unseen.used_fallback);
    CHECK(unseen.scores(1) == 1.0);

    // Seen head, no applicable rules: zero vector under the default,
    // fallback when the switch is on.
    AnswerVector zero = static_answer_query(g, rb, 0, 0, cfg);
    CHECK_FALSE(zero.used_fallback);
    CHECK(zero.scores.maxCoeff() == 0.0);

    cfg.fallback_on_empty = true;
    AnswerVector fb = static_answer_query(g, rb, 0, 0, cfg);
    CHECK(fb.used_fallback);
    CHECK(fb.scores(1) == 1.0);

    // Unseen relation direction: all-zero fallback vector, entities tie.
    Vocabulary v2;
    v2.add_entity("a");
    v2.add_entity("b");
    v2.add_relation("r");
    v2.add_relation("never");
    KnowledgeGraph g2 = build_graph({{0, 0, 1}}, std::move(v2));
    auto none = fallback_scores(1, g2.triples, g2.num_entities, g2.num_relations_orig);
    CHECK(none.maxCoeff() == 0.0);
}

TEST_CASE("single rule: neural and static answer queries coincide") {
    KnowledgeGraph g = synth::graph_from({
        {"a", "r1", "b"}, {"b", "r2", "c"}, {"a", "rh", "c"},
        {"x", "r1", "y"}, {"y", "r2", "z"}, {"x", "rh", "z"},
    });
    const RelationId rh = *g.vocab.relation_id("rh");
    const RelationId r1 = *g.vocab.relation_id("r1");
    const RelationId r2 = *g.vocab.relation_id("r2");
    // Restrict the rule base to exactly one rule so the softmax is a
    // singleton for both scorers.
    CandidateCounts only;
    only[Rule{rh, {r1, r2}}] = 1;
    RuleBase rb = build_rule_base(only, g, {});

    ModelConfig mc;
    mc.dim = 4;
    mc.gnn_layers = 1;
    mc.mlp_hidden = 4;
    mc.num_relations_aug = g.num_relations_aug();
    mc.dropout = 0.0;
    ModelParams params = ModelParams::init(mc, 303);
    SubgraphStore store = extract_all(g, 1, 10, 0);

    InferenceConfig cfg;
    NeuralRuleScorer neural(params, store, rb);
    AnswerVector a = answer_query(neural, g, rb, *g.vocab.entity_id("a"), rh, cfg);
    AnswerVector b = static_answer_query(g, rb, *g.vocab.entity_id("a"), rh, cfg);
    CHECK(a.scores == b.scores);
    REQUIRE(a.contributing.size() == 1);
    CHECK(a.contributing[0].weight == 1.0);
}
