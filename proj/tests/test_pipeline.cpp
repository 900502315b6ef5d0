#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "slogic/pipeline.hpp"
#include "slogic/util.hpp"

using namespace slogic;
namespace fs = std::filesystem;

namespace {

PipelineConfig mini_config(const std::string& out_dir) {
    PipelineConfig cfg;
    cfg.apply({{"train", "data/mini/train.txt"},
               {"valid", "data/mini/valid.txt"},
               {"test", "data/mini/test.txt"},
               {"out", out_dir},
               {"L", "3"},
               {"k", "2"},
               {"alpha", "20"},
               {"k_pos", "3"},
               {"k_neg", "5"},
               {"K", "20"},
               {"dim", "16"},
               {"gnn_layers", "1"},
               {"epochs", "2"},
               {"batch_size", "16"},
               {"N", "10"},
               {"seed", "5"},
               {"threads", "2"}});
    return cfg;
}

std::string fresh_dir(const std::string& name) {
    const auto dir = (fs::temp_directory_path() / name).string();
    fs::remove_all(dir);
    return dir;
}

}  // namespace

TEST_CASE("config: dataset presets, file parsing, overrides, validation") {
    PipelineConfig cfg;
    apply_dataset_preset(cfg, "wn18rr");
    CHECK(cfg.L == 5);
    CHECK(cfg.k == 4);
    CHECK(cfg.gnn_layers == 2);
    CHECK(cfg.N == 50);
    CHECK(cfg.resolved_K() == 100);  // auto 2N

    apply_dataset_preset(cfg, "yago3-10");
    CHECK(cfg.N == 10);
    CHECK(cfg.sample_fraction == doctest::Approx(0.1));
    CHECK(cfg.resolved_K() == 20);

    CHECK_THROWS_AS(apply_dataset_preset(cfg, "wn18"), UserError);
    CHECK_THROWS_AS(cfg.apply({{"bogus_key", "1"}}), UserError);
    CHECK_THROWS_AS(cfg.apply({{"L", "zero"}}), UserError);
    CHECK_THROWS_AS(cfg.apply({{"epochs", "-3"}}), UserError);

    const auto path = (fs::temp_directory_path() / "slogic_cfg.txt").string();
    {
        std::ofstream out(path);
        out << "# comment\n dataset = fb15k-237 \nL=2\nseed=9\n";
    }
    PipelineConfig from_file;
    from_file.apply(parse_config_file(path));
    CHECK(from_file.dataset == "fb15k-237");
    CHECK(from_file.L == 2);  // explicit key overrides the preset
    CHECK(from_file.k == 1);
    CHECK(from_file.seed == 9);
}

TEST_CASE("full mini pipeline: stages, artifacts, determinism") {
    const std::string dir = fresh_dir("slogic_pipe1");
    const std::vector<std::string> artifacts{"rules.tsv", "instances.tsv", "checkpoint.bin", "subgraphs.bin",
                                             "metrics.txt"};

    auto run_all = [&]() {
        PipelineConfig cfg = mini_config(dir);
        run_mine(cfg);
        run_subgraphs(cfg);
        run_instances(cfg);
        run_train(cfg);
        return run_eval(cfg, true);
    };
    auto snapshot_hashes = [&]() {
        std::map<std::string, std::uint64_t> h;
        for (const auto& name : artifacts) h[name] = hash_file(dir + "/" + name);
        return h;
    };
    auto snapshot_manifests = [&]() {
        std::map<std::string, nlohmann::json> m;
        for (const auto& name : artifacts) {
            nlohmann::json j;
            std::ifstream(dir + "/" + name + ".manifest.json") >> j;
            j.erase("wall_ms");  // the one legitimately varying field
            m[name] = j;
        }
        return m;
    };

    EvalResult r1 = run_all();
    CHECK(r1.has_model);
    CHECK(r1.has_baseline);
    CHECK(r1.model.num_queries == 2 * 8);
    const auto hashes1 = snapshot_hashes();
    const auto manifests1 = snapshot_manifests();

    // Rerun with identical config and seeds: bit-identical artifacts and
    // identical manifest hashes; only wall time may differ.
    fs::remove_all(dir);
    EvalResult r2 = run_all();
    CHECK(snapshot_hashes() == hashes1);
    CHECK(snapshot_manifests() == manifests1);
    CHECK(r1.model.mrr == r2.model.mrr);
    CHECK(r1.baseline.mrr == r2.baseline.mrr);

    // Stage isolation: delete a downstream artifact, rerun its stage only,
    // get the identical bytes back.
    PipelineConfig cfg = mini_config(dir);
    fs::remove(dir + "/instances.tsv");
    run_instances(cfg);
    CHECK(hash_file(dir + "/instances.tsv") == hashes1.at("instances.tsv"));
}

TEST_CASE("missing and stale artifacts name the stage to rerun") {
    const std::string dir = fresh_dir("slogic_pipe3");
    PipelineConfig cfg = mini_config(dir);
    CHECK_THROWS_WITH_AS(run_instances(cfg), doctest::Contains("mine"), UserError);
    CHECK_THROWS_WITH_AS(run_train(cfg), doctest::Contains("mine"), UserError);

    run_mine(cfg);
    run_subgraphs(cfg);
    // Tamper with the rule base; downstream must flag it.
    {
        std::ofstream out(dir + "/rules.tsv", std::ios::app);
        out << "# tampered\n";
    }
    CHECK_THROWS_WITH_AS(run_instances(cfg), doctest::Contains("mine"), UserError);
}

TEST_CASE("eval without a checkpoint requires --baseline") {
    const std::string dir = fresh_dir("slogic_pipe4");
    PipelineConfig cfg = mini_config(dir);
    run_mine(cfg);
    CHECK_THROWS_WITH_AS(run_eval(cfg, false), doctest::Contains("train"), UserError);
    EvalResult r = run_eval(cfg, true);
    CHECK_FALSE(r.has_model);
    CHECK(r.has_baseline);
    CHECK(r.baseline.num_queries == 2 * 8);
}

TEST_CASE("infer prints ranked answers with contributing rules") {
    const std::string dir = fresh_dir("slogic_pipe5");
    PipelineConfig cfg = mini_config(dir);
    run_mine(cfg);
    run_subgraphs(cfg);
    run_instances(cfg);
    run_train(cfg);
    const std::string report = run_infer(cfg, "p00", "lives_in", 5);
    CHECK(report.find("# query\tp00\tlives_in") != std::string::npos);
    CHECK(report.find("contributing rules") != std::string::npos);
    CHECK_THROWS_AS(run_infer(cfg, "nobody", "lives_in", 5), UserError);
    CHECK_THROWS_AS(run_infer(cfg, "p00", "no_such_relation", 5), UserError);
}
