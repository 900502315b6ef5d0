#include "slogic/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "slogic/instances.hpp"
#include "slogic/miner.hpp"
#include "slogic/model.hpp"
#include "slogic/rng.hpp"
#include "slogic/subgraph.hpp"
#include "slogic/util.hpp"

namespace slogic {

namespace fs = std::filesystem;
using nlohmann::json;

StagePaths::StagePaths(const std::string& dir)
    : out_dir(dir),
      graph_cache(dir + "/graph.bin"),
      rules_tsv(dir + "/rules.tsv"),
      subgraphs_bin(dir + "/subgraphs.bin"),
      instances_tsv(dir + "/instances.tsv"),
      checkpoint_bin(dir + "/checkpoint.bin"),
      metrics_txt(dir + "/metrics.txt") {}

namespace {

std::string manifest_path(const std::string& artifact) { return artifact + ".manifest.json"; }

void write_manifest(const std::string& artifact, const std::string& stage, const PipelineConfig& cfg,
                    const std::map<std::string, std::string>& inputs, double wall_ms) {
    json m;
    m["artifact_version"] = 1;
    m["stage"] = stage;
    m["seed"] = cfg.seed;
    m["wall_ms"] = wall_ms;
    m["config"] = cfg.to_map();
    json in = json::object();
    for (const auto& [path, unused] : inputs) {
        (void)unused;
        in[path] = hex64(hash_file(path));
    }
    m["inputs"] = in;
    m["output_hash"] = hex64(hash_file(artifact));
    std::ofstream out(manifest_path(artifact), std::ios::trunc);
    if (!out) throw UserError("cannot write manifest for " + artifact);
    out << m.dump(2) << "\n";
}

// Checks that a required upstream artifact exists and that the inputs its
// manifest recorded have not changed since it was produced.
void require_fresh(const std::string& artifact, const std::string& producer_stage) {
    if (!fs::exists(artifact)) {
        throw UserError("missing artifact '" + artifact + "'; run `slogic " + producer_stage + "` first");
    }
    const std::string mpath = manifest_path(artifact);
    if (!fs::exists(mpath)) return;  // hand-supplied artifact; accept as-is
    std::ifstream in(mpath);
    json m;
    try {
        in >> m;
    } catch (const std::exception&) {
        throw UserError("unreadable manifest '" + mpath + "'; rerun `slogic " + producer_stage + "`");
    }
    if (m.contains("output_hash") && m["output_hash"].get<std::string>() != hex64(hash_file(artifact))) {
        throw UserError("artifact '" + artifact + "' does not match its manifest; rerun `slogic " + producer_stage +
                        "`");
    }
    if (m.contains("inputs")) {
        for (const auto& [path, recorded] : m["inputs"].items()) {
            if (!fs::exists(path) || hex64(hash_file(path)) != recorded.get<std::string>()) {
                throw UserError("stale artifact '" + artifact + "': input '" + path + "' changed; rerun `slogic " +
                                producer_stage + "`");
            }
        }
    }
}

KnowledgeGraph load_train_graph(const PipelineConfig& cfg, const StagePaths& paths) {
    if (fs::exists(paths.graph_cache)) {
        require_fresh(paths.graph_cache, "mine");
        return KnowledgeGraph::load_cache(paths.graph_cache);
    }
    if (cfg.train_path.empty()) throw UserError("no train path configured (set train=... or --train)");
    auto loaded = load_triples(cfg.train_path);
    return build_graph(loaded.triples, std::move(loaded.vocab));
}

ModelConfig model_config(const PipelineConfig& cfg, const KnowledgeGraph& g) {
    ModelConfig mc;
    mc.dim = cfg.dim;
    mc.gnn_layers = cfg.gnn_layers;
    mc.mlp_hidden = cfg.resolved_mlp_hidden();
    mc.num_relations_aug = g.num_relations_aug();
    mc.dropout = cfg.dropout;
    return mc;
}

}  // namespace

void run_mine(const PipelineConfig& cfg) {
    if (cfg.train_path.empty()) throw UserError("no train path configured (set train=... or --train)");
    StagePaths paths(cfg.out_dir);
    fs::create_directories(paths.out_dir);

    StopWatch watch;
    auto loaded = load_triples(cfg.train_path);
    KnowledgeGraph g = build_graph(loaded.triples, std::move(loaded.vocab));
    std::fprintf(stderr, "[mine] graph: %d entities, %d relations, %zu triples\n", g.num_entities,
                 g.num_relations_orig, g.triples.size());

    CandidateCounts candidates = mine_rules(g, cfg.L, cfg.sample_fraction, cfg.seed, cfg.threads);
    std::fprintf(stderr, "[mine] %zu candidate rules after %.1f ms\n", candidates.size(), watch.elapsed_ms());

    RuleBaseConfig rb_cfg;
    rb_cfg.z = cfg.z;
    rb_cfg.min_body_count = cfg.min_body_count;
    rb_cfg.threads = cfg.threads;
    RuleBase rb = build_rule_base(candidates, g, rb_cfg);

    g.save_cache(paths.graph_cache);
    rb.save_tsv(paths.rules_tsv, g.vocab);
    const double wall = watch.elapsed_ms();
    write_manifest(paths.graph_cache, "mine", cfg, {{cfg.train_path, ""}}, wall);
    write_manifest(paths.rules_tsv, "mine", cfg, {{cfg.train_path, ""}}, wall);
    std::fprintf(stderr, "[mine] rule base: %zu rules -> %s (%.1f ms)\n", rb.size(), paths.rules_tsv.c_str(), wall);
}

void run_subgraphs(const PipelineConfig& cfg) {
    StagePaths paths(cfg.out_dir);
    fs::create_directories(paths.out_dir);
    StopWatch watch;
    KnowledgeGraph g = load_train_graph(cfg, paths);
    SubgraphStore store = extract_all(g, cfg.k, cfg.alpha, cfg.seed, cfg.threads);
    store.save(paths.subgraphs_bin);
    const double wall = watch.elapsed_ms();
    std::map<std::string, std::string> inputs;
    if (fs::exists(paths.graph_cache)) inputs.emplace(paths.graph_cache, "");
    else inputs.emplace(cfg.train_path, "");
    write_manifest(paths.subgraphs_bin, "subgraphs", cfg, inputs, wall);
    std::fprintf(stderr, "[subgraphs] %zu subgraphs -> %s (%.1f ms)\n", store.size(), paths.subgraphs_bin.c_str(),
                 wall);
}

void run_instances(const PipelineConfig& cfg) {
    StagePaths paths(cfg.out_dir);
    fs::create_directories(paths.out_dir);
    require_fresh(paths.rules_tsv, "mine");
    StopWatch watch;
    KnowledgeGraph g = load_train_graph(cfg, paths);
    RuleBase rb = RuleBase::load_tsv(paths.rules_tsv, g.vocab);

    GenerateConfig gen;
    gen.k_pos = cfg.k_pos;
    gen.k_neg = cfg.k_neg;
    gen.pool_size = cfg.resolved_K();
    gen.seed = cfg.seed;
    gen.threads = cfg.threads;
    GenerateStats stats;
    write_instances_tsv(paths.instances_tsv, g, rb, gen, &stats);
    const double wall = watch.elapsed_ms();
    std::map<std::string, std::string> inputs{{paths.rules_tsv, ""}};
    if (fs::exists(paths.graph_cache)) inputs.emplace(paths.graph_cache, "");
    else inputs.emplace(cfg.train_path, "");
    write_manifest(paths.instances_tsv, "instances", cfg, inputs, wall);
    const double expansion =
        g.triples.empty() ? 0.0 : static_cast<double>(stats.pairs) / static_cast<double>(g.triples.size());
    std::fprintf(stderr,
                 "[instances] %lld records, %lld pairs over %lld queries (%.1fx triple expansion) -> %s (%.1f ms)\n",
                 static_cast<long long>(stats.records), static_cast<long long>(stats.pairs),
                 static_cast<long long>(stats.queries), expansion, paths.instances_tsv.c_str(), wall);
}

void run_train(const PipelineConfig& cfg) {
    StagePaths paths(cfg.out_dir);
    fs::create_directories(paths.out_dir);
    require_fresh(paths.rules_tsv, "mine");
    require_fresh(paths.subgraphs_bin, "subgraphs");
    require_fresh(paths.instances_tsv, "instances");

    StopWatch watch;
    KnowledgeGraph g = load_train_graph(cfg, paths);
    RuleBase rb = RuleBase::load_tsv(paths.rules_tsv, g.vocab);
    SubgraphStore store = SubgraphStore::load(paths.subgraphs_bin);
    std::vector<TrainingRecord> records = read_instances_tsv(paths.instances_tsv, g.vocab);

    ModelParams params = ModelParams::init(model_config(cfg, g), cfg.seed);
    AdamState adam(params);
    TrainConfig tc;
    tc.lr = cfg.lr;
    tc.epsilon = cfg.epsilon;
    tc.epochs = cfg.epochs;
    tc.batch_size = cfg.batch_size;
    tc.seed = cfg.seed;
    tc.verbose = true;
    TrainResult result = train(params, adam, records, store, rb, g, tc);

    std::map<std::string, std::string> snapshot = cfg.to_map();
    for (std::size_t e = 0; e < result.epoch_loss.size(); ++e) {
        snapshot["epoch_loss_" + std::to_string(e + 1)] = std::to_string(result.epoch_loss[e]);
    }
    save_checkpoint(paths.checkpoint_bin, params, &adam, snapshot);
    const double wall = watch.elapsed_ms();
    write_manifest(paths.checkpoint_bin, "train", cfg,
                   {{paths.rules_tsv, ""}, {paths.subgraphs_bin, ""}, {paths.instances_tsv, ""}}, wall);
    std::fprintf(stderr, "[train] %lld steps, final epoch loss %.6f -> %s (%.1f ms)\n",
                 static_cast<long long>(result.steps), result.epoch_loss.empty() ? 0.0 : result.epoch_loss.back(),
                 paths.checkpoint_bin.c_str(), wall);
}

namespace {

InferenceConfig inference_config(const PipelineConfig& cfg) {
    InferenceConfig ic;
    ic.top_n = cfg.N;
    ic.temperature = cfg.T;
    ic.tanh_scale = cfg.tau;
    ic.ground_cap = cfg.ground_cap;
    ic.fallback_on_empty = cfg.fallback_on_empty;
    return ic;
}

}  // namespace

EvalResult run_eval(const PipelineConfig& cfg, bool with_baseline) {
    StagePaths paths(cfg.out_dir);
    fs::create_directories(paths.out_dir);
    require_fresh(paths.rules_tsv, "mine");
    if (cfg.test_path.empty()) throw UserError("no test path configured (set test=... or --test)");

    StopWatch watch;
    KnowledgeGraph g = load_train_graph(cfg, paths);
    RuleBase rb = RuleBase::load_tsv(paths.rules_tsv, g.vocab);

    Vocabulary vocab = g.vocab;
    std::vector<std::vector<Triple>> splits;
    splits.push_back(g.triples);
    if (!cfg.valid_path.empty()) {
        auto valid = load_triples(cfg.valid_path, &vocab);
        vocab = valid.vocab;
        splits.push_back(std::move(valid.triples));
    }
    auto test = load_triples(cfg.test_path, &vocab);
    vocab = test.vocab;
    splits.push_back(test.triples);

    const InferenceConfig ic = inference_config(cfg);
    EvalResult result;

    const bool has_checkpoint = fs::exists(paths.checkpoint_bin);
    if (has_checkpoint) {
        require_fresh(paths.checkpoint_bin, "train");
        require_fresh(paths.subgraphs_bin, "subgraphs");
        Checkpoint ck = load_checkpoint(paths.checkpoint_bin);
        SubgraphStore store = SubgraphStore::load(paths.subgraphs_bin);
        NeuralRuleScorer scorer(ck.params, store, rb);
        result.model = evaluate([&](EntityId h, RelationId r) { return answer_query(scorer, g, rb, h, r, ic); },
                                test.triples, splits, g, cfg.threads);
        result.has_model = true;
    } else if (!with_baseline) {
        throw UserError("missing artifact '" + paths.checkpoint_bin + "'; run `slogic train` first or pass --baseline");
    }
    if (with_baseline || !has_checkpoint) {
        result.baseline = evaluate([&](EntityId h, RelationId r) { return static_answer_query(g, rb, h, r, ic); },
                                   test.triples, splits, g, cfg.threads);
        result.has_baseline = true;
    }

    std::ofstream report(paths.metrics_txt, std::ios::trunc);
    if (!report) throw UserError("cannot write metrics report: " + paths.metrics_txt);
    report << "# slogic evaluation report\n";
    for (const auto& [key, value] : cfg.to_map()) report << "config." << key << "\t" << value << "\n";
    if (result.has_model) {
        report << "\n[model]\n" << format_metrics(result.model);
    }
    if (result.has_baseline) {
        report << "\n[static-wilson-baseline]\n" << format_metrics(result.baseline);
    }
    report.close();
    const double wall = watch.elapsed_ms();
    std::map<std::string, std::string> inputs{{paths.rules_tsv, ""}, {cfg.test_path, ""}};
    if (has_checkpoint) inputs.emplace(paths.checkpoint_bin, "");
    write_manifest(paths.metrics_txt, "eval", cfg, inputs, wall);
    if (result.has_model) {
        std::fprintf(stderr, "[eval] model MRR %.4f hits@1 %.4f hits@10 %.4f (%lld queries, %lld fallback)\n",
                     result.model.mrr, result.model.hits1, result.model.hits10,
                     static_cast<long long>(result.model.num_queries),
                     static_cast<long long>(result.model.fallback_count));
    }
    if (result.has_baseline) {
        std::fprintf(stderr, "[eval] baseline MRR %.4f hits@1 %.4f hits@10 %.4f\n", result.baseline.mrr,
                     result.baseline.hits1, result.baseline.hits10);
    }
    std::fprintf(stderr, "[eval] report -> %s (%.1f ms)\n", paths.metrics_txt.c_str(), wall);
    return result;
}

std::string run_infer(const PipelineConfig& cfg, const std::string& head_name, const std::string& relation_name,
                      int top_k) {
    StagePaths paths(cfg.out_dir);
    require_fresh(paths.rules_tsv, "mine");
    require_fresh(paths.checkpoint_bin, "train");
    require_fresh(paths.subgraphs_bin, "subgraphs");

    KnowledgeGraph g = load_train_graph(cfg, paths);
    RuleBase rb = RuleBase::load_tsv(paths.rules_tsv, g.vocab);
    Checkpoint ck = load_checkpoint(paths.checkpoint_bin);
    SubgraphStore store = SubgraphStore::load(paths.subgraphs_bin);

    const auto h = g.vocab.entity_id(head_name);
    if (!h) throw UserError("unknown entity: " + head_name);
    const auto r = g.vocab.parse_relation(relation_name);
    if (!r) throw UserError("unknown relation: " + relation_name);

    NeuralRuleScorer scorer(ck.params, store, rb);
    AnswerVector ans = answer_query(scorer, g, rb, *h, *r, inference_config(cfg));

    std::vector<EntityId> order(static_cast<std::size_t>(g.num_entities));
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<EntityId>(i);
    std::stable_sort(order.begin(), order.end(),
                     [&](EntityId a, EntityId b) { return ans.scores(a) > ans.scores(b); });

    std::string out;
    char buf[512];
    std::snprintf(buf, sizeof(buf), "# query\t%s\t%s\n", head_name.c_str(), relation_name.c_str());
    out += buf;
    if (ans.used_fallback) out += "# fallback: tail-frequency scores (head unseen or no applicable rules)\n";
    const int n = std::min<int>(top_k, g.num_entities);
    for (int i = 0; i < n; ++i) {
        std::snprintf(buf, sizeof(buf), "%d\t%s\t%.6f\n", i + 1, g.vocab.entity_name(order[static_cast<std::size_t>(i)]).c_str(),
                      ans.scores(order[static_cast<std::size_t>(i)]));
        out += buf;
    }
    out += "# contributing rules (weight, phi, wilson, body)\n";
    for (const auto& c : ans.contributing) {
        const auto& [rule, stats] = rb.rules()[static_cast<std::size_t>(c.rule_idx)];
        std::string body;
        for (std::size_t i = 0; i < rule.body.size(); ++i) {
            if (i) body += ',';
            body += g.vocab.relation_name(rule.body[i]);
        }
        std::snprintf(buf, sizeof(buf), "%.6f\t%.6f\t%.6f\t%s\n", c.weight, c.phi, stats.wilson, body.c_str());
        out += buf;
    }
    return out;
}

}  // namespace slogic
