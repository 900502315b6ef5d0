// slogic command-line driver: mine -> subgraphs -> instances -> train ->
// eval / infer, with dataset-keyed defaults, a flat key=value config file
// and per-flag overrides.

#include <CLI11.hpp>
#include <cstdio>
#include <map>
#include <string>

#include "slogic/config.hpp"
#include "slogic/pipeline.hpp"
#include "slogic/util.hpp"

namespace {

struct CliState {
    std::string config_path;
    std::map<std::string, std::string> overrides;
};

void add_shared_options(CLI::App* cmd, CliState& state) {
    cmd->add_option("--config", state.config_path, "flat key=value config file");
    auto kv = [&state](const std::string& key) {
        return [&state, key](const std::string& value) { state.overrides[key] = value; };
    };
    cmd->add_option_function<std::string>("--dataset", kv("dataset"), "preset: wn18rr, fb15k-237 or yago3-10");
    cmd->add_option_function<std::string>("--train", kv("train"), "training triples (TSV)");
    cmd->add_option_function<std::string>("--valid", kv("valid"), "validation triples (TSV)");
    cmd->add_option_function<std::string>("--test", kv("test"), "test triples (TSV)");
    cmd->add_option_function<std::string>("--out", kv("out"), "artifact output directory");
    for (const char* key : {"L", "k", "alpha", "k_pos", "k_neg", "K", "epsilon", "lr", "epochs", "dim", "dropout",
                            "gnn_layers", "mlp_hidden", "N", "T", "tau", "z", "sample_fraction", "min_body_count",
                            "batch_size", "seed", "threads", "ground_cap", "fallback_on_empty"}) {
        cmd->add_option_function<std::string>(std::string("--") + key, kv(key), "hyperparameter");
    }
}

slogic::PipelineConfig resolve_config(const CliState& state) {
    slogic::PipelineConfig cfg;
    if (!state.config_path.empty()) cfg.apply(slogic::parse_config_file(state.config_path));
    cfg.apply(state.overrides);
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SLogic: subgraph-informed logical rule learning for knowledge graph completion"};
    app.require_subcommand(1);

    CliState mine_state, subgraphs_state, instances_state, train_state, eval_state, infer_state;

    auto* mine = app.add_subcommand("mine", "mine rules and build the static rule base");
    add_shared_options(mine, mine_state);
    auto* subgraphs = app.add_subcommand("subgraphs", "extract the per-entity k-hop subgraph store");
    add_shared_options(subgraphs, subgraphs_state);
    auto* instances = app.add_subcommand("instances", "generate rule-enriched training instances");
    add_shared_options(instances, instances_state);
    auto* train = app.add_subcommand("train", "train the query-conditioned rule scorer");
    add_shared_options(train, train_state);

    auto* eval = app.add_subcommand("eval", "filtered-ranking evaluation on the test split");
    add_shared_options(eval, eval_state);
    bool baseline = false;
    eval->add_flag("--baseline", baseline, "also report the static-Wilson baseline");

    auto* infer = app.add_subcommand("infer", "answer a single (head, relation, ?) query");
    add_shared_options(infer, infer_state);
    std::string head_name, relation_name;
    int top_k = 10;
    infer->add_option("head", head_name, "head entity name")->required();
    infer->add_option("relation", relation_name, "relation name (append __inv for the inverse direction)")->required();
    infer->add_option("--topk", top_k, "answers to print");

    CLI11_PARSE(app, argc, argv);

    try {
        if (mine->parsed()) {
            slogic::run_mine(resolve_config(mine_state));
        } else if (subgraphs->parsed()) {
            slogic::run_subgraphs(resolve_config(subgraphs_state));
        } else if (instances->parsed()) {
            slogic::run_instances(resolve_config(instances_state));
        } else if (train->parsed()) {
            slogic::run_train(resolve_config(train_state));
        } else if (eval->parsed()) {
            slogic::run_eval(resolve_config(eval_state), baseline);
        } else if (infer->parsed()) {
            std::fputs(slogic::run_infer(resolve_config(infer_state), head_name, relation_name, top_k).c_str(),
                       stdout);
        }
    } catch (const slogic::UserError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 2;
    }
    return 0;
}
