#include "slogic/config.hpp"

#include <fstream>

#include "slogic/util.hpp"

namespace slogic {

void apply_dataset_preset(PipelineConfig& cfg, const std::string& dataset) {
    cfg.dataset = dataset;
    if (dataset == "wn18rr") {
        cfg.L = 5;
        cfg.k = 4;
        cfg.N = 50;
        cfg.gnn_layers = 2;
        cfg.sample_fraction = 1.0;
    } else if (dataset == "fb15k-237") {
        cfg.L = 3;
        cfg.k = 1;
        cfg.N = 50;
        cfg.gnn_layers = 1;
        cfg.sample_fraction = 1.0;
    } else if (dataset == "yago3-10") {
        cfg.L = 3;
        cfg.k = 1;
        cfg.N = 10;
        cfg.gnn_layers = 1;
        cfg.sample_fraction = 0.1;
    } else {
        throw UserError("unknown dataset preset: " + dataset + " (expected wn18rr, fb15k-237 or yago3-10)");
    }
}

namespace {

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "1" || v == "true" || v == "yes") return true;
    if (v == "0" || v == "false" || v == "no") return false;
    throw UserError("config key '" + key + "': expected a boolean, got '" + v + "'");
}

template <typename T, typename Parse>
T parse_num(const std::string& v, const std::string& key, Parse parse) {
    try {
        std::size_t pos = 0;
        T out = parse(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return out;
    } catch (const std::exception&) {
        throw UserError("config key '" + key + "': cannot parse '" + v + "'");
    }
}

int parse_int(const std::string& v, const std::string& key) {
    return parse_num<int>(v, key, [](const std::string& s, std::size_t* p) { return std::stoi(s, p); });
}

std::int64_t parse_i64(const std::string& v, const std::string& key) {
    return parse_num<std::int64_t>(v, key, [](const std::string& s, std::size_t* p) { return std::stoll(s, p); });
}

std::uint64_t parse_u64(const std::string& v, const std::string& key) {
    return parse_num<std::uint64_t>(v, key, [](const std::string& s, std::size_t* p) { return std::stoull(s, p); });
}

double parse_double(const std::string& v, const std::string& key) {
    return parse_num<double>(v, key, [](const std::string& s, std::size_t* p) { return std::stod(s, p); });
}

}  // namespace

void PipelineConfig::apply(const std::map<std::string, std::string>& kv) {
    if (auto it = kv.find("dataset"); it != kv.end()) apply_dataset_preset(*this, it->second);
    for (const auto& [key, value] : kv) {
        if (key == "dataset") {
            continue;
        } else if (key == "train") {
            train_path = value;
        } else if (key == "valid") {
            valid_path = value;
        } else if (key == "test") {
            test_path = value;
        } else if (key == "out") {
            out_dir = value;
        } else if (key == "L") {
            L = parse_int(value, key);
        } else if (key == "k") {
            k = parse_int(value, key);
        } else if (key == "alpha") {
            alpha = parse_int(value, key);
        } else if (key == "k_pos") {
            k_pos = parse_int(value, key);
        } else if (key == "k_neg") {
            k_neg = parse_int(value, key);
        } else if (key == "K") {
            K = parse_int(value, key);
        } else if (key == "epsilon") {
            epsilon = parse_double(value, key);
        } else if (key == "lr") {
            lr = parse_double(value, key);
        } else if (key == "epochs") {
            epochs = parse_int(value, key);
        } else if (key == "dim") {
            dim = parse_int(value, key);
        } else if (key == "dropout") {
            dropout = parse_double(value, key);
        } else if (key == "gnn_layers") {
            gnn_layers = parse_int(value, key);
        } else if (key == "mlp_hidden") {
            mlp_hidden = parse_int(value, key);
        } else if (key == "N") {
            N = parse_int(value, key);
        } else if (key == "T") {
            T = parse_double(value, key);
        } else if (key == "tau") {
            tau = parse_double(value, key);
        } else if (key == "z") {
            z = parse_double(value, key);
        } else if (key == "sample_fraction") {
            sample_fraction = parse_double(value, key);
        } else if (key == "min_body_count") {
            min_body_count = parse_i64(value, key);
        } else if (key == "batch_size") {
            batch_size = parse_int(value, key);
        } else if (key == "seed") {
            seed = parse_u64(value, key);
        } else if (key == "threads") {
            threads = parse_int(value, key);
        } else if (key == "ground_cap") {
            ground_cap = parse_i64(value, key);
        } else if (key == "fallback_on_empty") {
            fallback_on_empty = parse_bool(value, key);
        } else {
            throw UserError("unknown config key: " + key);
        }
    }

    if (L < 1 || k < 1 || alpha < 1 || k_pos < 1 || k_neg < 1 || epochs < 1 || dim < 1 || gnn_layers < 1 || N < 1 ||
        batch_size < 1) {
        throw UserError("all hyperparameters must be positive");
    }
    if (T <= 0 || tau <= 0 || z <= 0 || lr <= 0 || epsilon < 0) {
        throw UserError("T, tau, z and lr must be positive; epsilon must be nonnegative");
    }
    if (sample_fraction <= 0.0 || sample_fraction > 1.0) throw UserError("sample_fraction must be in (0, 1]");
    if (K > 0 && K < k_neg) throw UserError("K must be >= k_neg");
}

std::map<std::string, std::string> PipelineConfig::to_map() const {
    std::map<std::string, std::string> m;
    m["dataset"] = dataset;
    m["train"] = train_path;
    m["valid"] = valid_path;
    m["test"] = test_path;
    m["out"] = out_dir;
    m["L"] = std::to_string(L);
    m["k"] = std::to_string(k);
    m["alpha"] = std::to_string(alpha);
    m["k_pos"] = std::to_string(k_pos);
    m["k_neg"] = std::to_string(k_neg);
    m["K"] = std::to_string(resolved_K());
    m["epsilon"] = std::to_string(epsilon);
    m["lr"] = std::to_string(lr);
    m["epochs"] = std::to_string(epochs);
    m["dim"] = std::to_string(dim);
    m["dropout"] = std::to_string(dropout);
    m["gnn_layers"] = std::to_string(gnn_layers);
    m["mlp_hidden"] = std::to_string(resolved_mlp_hidden());
    m["N"] = std::to_string(N);
    m["T"] = std::to_string(T);
    m["tau"] = std::to_string(tau);
    m["z"] = std::to_string(z);
    m["sample_fraction"] = std::to_string(sample_fraction);
    m["min_body_count"] = std::to_string(min_body_count);
    m["batch_size"] = std::to_string(batch_size);
    m["seed"] = std::to_string(seed);
    m["threads"] = std::to_string(threads);
    m["ground_cap"] = std::to_string(ground_cap);
    m["fallback_on_empty"] = fallback_on_empty ? "1" : "0";
    return m;
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UserError("cannot open config file: " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t");
        line = line.substr(first, last - first + 1);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw UserError(path + ":" + std::to_string(line_no) + ": expected key=value");
        }
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t");
            if (b == std::string::npos) return std::string();
            const auto e = s.find_last_not_of(" \t");
            return s.substr(b, e - b + 1);
        };
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

}  // namespace slogic
