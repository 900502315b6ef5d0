#include "slogic/model.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>

#include "slogic/util.hpp"

namespace slogic {

namespace {

ad::Mat glorot(int rows, int cols, Rng& rng) {
    const double a = std::sqrt(6.0 / static_cast<double>(rows + cols));
    ad::Mat m(rows, cols);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = (2.0 * rng.uniform() - 1.0) * a;
    }
    return m;
}

ad::Mat gaussian(int rows, int cols, double stddev, Rng& rng) {
    ad::Mat m(rows, cols);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = stddev * rng.normal();
    }
    return m;
}

constexpr int kFeatureDim = 4;  // node feature width
constexpr int kStaticDim = 4;   // rule statistics width

}  // namespace

ModelParams ModelParams::init(const ModelConfig& cfg, std::uint64_t seed) {
    Rng rng(seed);
    ModelParams p;
    p.cfg = cfg;
    const int d = cfg.dim;
    p.rel_emb = gaussian(cfg.num_relations_aug + 1, d, 0.1, rng);
    p.rel_emb.row(cfg.num_relations_aug).setZero();  // padding slot

    int in_dim = kFeatureDim;
    for (int l = 0; l < cfg.gnn_layers; ++l) {
        RgcnLayer layer;
        layer.w_self = glorot(in_dim, d, rng);
        layer.w_rel.reserve(static_cast<std::size_t>(cfg.num_relations_aug));
        for (int r = 0; r < cfg.num_relations_aug; ++r) layer.w_rel.push_back(glorot(in_dim, d, rng));
        layer.bias = ad::Mat::Zero(1, d);
        p.gnn.push_back(std::move(layer));
        in_dim = d;
    }

    p.gru.wz = glorot(d, d, rng);
    p.gru.uz = glorot(d, d, rng);
    p.gru.bz = ad::Mat::Zero(1, d);
    p.gru.wr = glorot(d, d, rng);
    p.gru.ur = glorot(d, d, rng);
    p.gru.br = ad::Mat::Zero(1, d);
    p.gru.wh = glorot(d, d, rng);
    p.gru.uh = glorot(d, d, rng);
    p.gru.bh = ad::Mat::Zero(1, d);

    p.mlp_w1 = glorot(4 * d + kStaticDim, cfg.mlp_hidden, rng);
    p.mlp_b1 = ad::Mat::Zero(1, cfg.mlp_hidden);
    p.mlp_w2 = glorot(cfg.mlp_hidden, 1, rng);
    p.mlp_b2 = ad::Mat::Zero(1, 1);
    return p;
}

ModelParams ModelParams::zeros_like() const {
    ModelParams z = *this;
    for (auto& [name, mat] : z.tensors()) {
        (void)name;
        mat->setZero();
    }
    return z;
}

std::vector<std::pair<std::string, ad::Mat*>> ModelParams::tensors() {
    std::vector<std::pair<std::string, ad::Mat*>> out;
    out.emplace_back("rel_emb", &rel_emb);
    for (std::size_t l = 0; l < gnn.size(); ++l) {
        const std::string p = "gnn" + std::to_string(l) + ".";
        out.emplace_back(p + "w_self", &gnn[l].w_self);
        for (std::size_t r = 0; r < gnn[l].w_rel.size(); ++r) {
            out.emplace_back(p + "w_rel" + std::to_string(r), &gnn[l].w_rel[r]);
        }
        out.emplace_back(p + "bias", &gnn[l].bias);
    }
    out.emplace_back("gru.wz", &gru.wz);
    out.emplace_back("gru.uz", &gru.uz);
    out.emplace_back("gru.bz", &gru.bz);
    out.emplace_back("gru.wr", &gru.wr);
    out.emplace_back("gru.ur", &gru.ur);
    out.emplace_back("gru.br", &gru.br);
    out.emplace_back("gru.wh", &gru.wh);
    out.emplace_back("gru.uh", &gru.uh);
    out.emplace_back("gru.bh", &gru.bh);
    out.emplace_back("mlp.w1", &mlp_w1);
    out.emplace_back("mlp.b1", &mlp_b1);
    out.emplace_back("mlp.w2", &mlp_w2);
    out.emplace_back("mlp.b2", &mlp_b2);
    return out;
}

std::vector<std::pair<std::string, const ad::Mat*>> ModelParams::tensors() const {
    std::vector<std::pair<std::string, const ad::Mat*>> out;
    for (auto& [name, mat] : const_cast<ModelParams*>(this)->tensors()) out.emplace_back(name, mat);
    return out;
}

Eigen::RowVector4d static_features(const RuleStats& stats) {
    Eigen::RowVector4d f;
    f << std::log1p(static_cast<double>(stats.support)), stats.confidence, stats.laplace, stats.wilson;
    return f;
}

double margin_loss(double pos, double neg, double epsilon) { return std::max(0.0, epsilon - (pos - neg)); }

ParamVars make_param_vars(ad::Tape& tape, const ModelParams& params, ModelParams* grads) {
    ParamVars pv;
    auto ptensors = const_cast<ModelParams&>(params).tensors();
    std::vector<std::pair<std::string, ad::Mat*>> gtensors;
    if (grads) gtensors = grads->tensors();

    std::size_t at = 0;
    auto next = [&]() {
        ad::Mat* gslot = grads ? gtensors[at].second : nullptr;
        ad::Var v = tape.leaf(ptensors[at].second, gslot);
        ++at;
        return v;
    };

    pv.rel_emb = next();
    pv.gnn.resize(params.gnn.size());
    for (std::size_t l = 0; l < params.gnn.size(); ++l) {
        pv.gnn[l].w_self = next();
        pv.gnn[l].w_rel.resize(params.gnn[l].w_rel.size());
        for (std::size_t r = 0; r < params.gnn[l].w_rel.size(); ++r) pv.gnn[l].w_rel[r] = next();
        pv.gnn[l].bias = next();
    }
    pv.gru.wz = next();
    pv.gru.uz = next();
    pv.gru.bz = next();
    pv.gru.wr = next();
    pv.gru.ur = next();
    pv.gru.br = next();
    pv.gru.wh = next();
    pv.gru.uh = next();
    pv.gru.bh = next();
    pv.mlp_w1 = next();
    pv.mlp_b1 = next();
    pv.mlp_w2 = next();
    pv.mlp_b2 = next();
    return pv;
}

MessageAdjacency build_message_adjacency(const Subgraph& sg) {
    const int n = static_cast<int>(sg.num_nodes());
    // Group incoming edges by relation, then mean-normalize per (node, rel).
    std::map<RelationId, std::vector<std::pair<std::int32_t, std::int32_t>>> by_rel;  // (dst, src)
    for (const auto& e : sg.edges) by_rel[e.rel].emplace_back(e.dst, e.src);

    MessageAdjacency out;
    for (auto& [rel, entries] : by_rel) {
        std::sort(entries.begin(), entries.end());
        ad::SparseCoeffs coeffs;
        coeffs.rows = n;
        coeffs.cols = n;
        coeffs.row_entries.resize(static_cast<std::size_t>(n));
        std::size_t i = 0;
        while (i < entries.size()) {
            std::size_t j = i;
            while (j < entries.size() && entries[j].first == entries[i].first) ++j;
            const double norm = 1.0 / static_cast<double>(j - i);
            for (std::size_t k = i; k < j; ++k) {
                coeffs.row_entries[static_cast<std::size_t>(entries[k].first)].emplace_back(entries[k].second, norm);
            }
            i = j;
        }
        out.per_relation.emplace_back(rel, std::move(coeffs));
    }
    return out;
}

SubgraphEncoding encode_subgraph(ad::Tape& tape, const ParamVars& pv, const ModelConfig& cfg, const Subgraph& sg,
                                 const MessageAdjacency& adj, bool training, Rng& rng) {
    ad::Var h = tape.constant(sg.features);
    for (std::size_t l = 0; l < pv.gnn.size(); ++l) {
        ad::Var acc = tape.matmul(h, pv.gnn[l].w_self);
        for (const auto& [rel, coeffs] : adj.per_relation) {
            ad::Var rel_msg = tape.matmul(tape.spmm(coeffs, h), pv.gnn[l].w_rel[static_cast<std::size_t>(rel)]);
            acc = tape.add(acc, rel_msg);
        }
        h = tape.relu(tape.add_rowvec(acc, pv.gnn[l].bias));
        h = tape.dropout(h, cfg.dropout, rng, training);
    }
    return {tape.row(h, 0), tape.mean_rows(h)};
}

ad::Var encode_bodies(ad::Tape& tape, const ParamVars& pv, const ModelConfig& cfg,
                      std::span<const std::vector<RelationId>> bodies, int batch_max_len) {
    const int n = static_cast<int>(bodies.size());
    const int pad = cfg.num_relations_aug;
    for (const auto& b : bodies) {
        if (b.empty()) throw std::invalid_argument("rule body must be non-empty");
        if (static_cast<int>(b.size()) > batch_max_len) throw std::invalid_argument("body longer than batch_max_len");
    }

    ad::Var h = tape.constant(ad::Mat::Zero(n, cfg.dim));
    for (int step = 0; step < batch_max_len; ++step) {
        std::vector<int> ids(static_cast<std::size_t>(n), pad);
        Eigen::VectorXd mask = Eigen::VectorXd::Zero(n);
        bool any_real = false, all_real = true;
        for (int i = 0; i < n; ++i) {
            const auto& body = bodies[static_cast<std::size_t>(i)];
            const int offset = batch_max_len - static_cast<int>(body.size());  // left padding
            if (step >= offset) {
                ids[static_cast<std::size_t>(i)] = body[static_cast<std::size_t>(step - offset)];
                mask(i) = 1.0;
                any_real = true;
            } else {
                all_real = false;
            }
        }
        if (!any_real) continue;  // pure padding step

        ad::Var x = tape.gather_rows(pv.rel_emb, std::move(ids));
        ad::Var z = tape.sigmoid(tape.add_rowvec(tape.add(tape.matmul(x, pv.gru.wz), tape.matmul(h, pv.gru.uz)), pv.gru.bz));
        ad::Var r = tape.sigmoid(tape.add_rowvec(tape.add(tape.matmul(x, pv.gru.wr), tape.matmul(h, pv.gru.ur)), pv.gru.br));
        ad::Var cand = tape.tanh(
            tape.add_rowvec(tape.add(tape.matmul(x, pv.gru.wh), tape.matmul(tape.hadamard(r, h), pv.gru.uh)), pv.gru.bh));
        ad::Var one_minus_z = tape.add_const(tape.scale(z, -1.0), 1.0);
        ad::Var h_new = tape.add(tape.hadamard(one_minus_z, h), tape.hadamard(z, cand));

        if (all_real) {
            h = h_new;
        } else {
            // Padded rows keep their previous hidden state; no gradient can
            // reach the padding embedding through the masked step.
            Eigen::VectorXd keep = Eigen::VectorXd::Ones(n) - mask;
            h = tape.add(tape.col_mask(h_new, mask), tape.col_mask(h, keep));
        }
    }
    return h;
}

ad::Var score_rules(ad::Tape& tape, const ParamVars& pv, const ModelConfig& cfg, const SubgraphEncoding& enc,
                    RelationId query_relation, std::span<const std::vector<RelationId>> bodies,
                    const ad::Mat& static_feats, bool training, Rng& rng) {
    const int n = static_cast<int>(bodies.size());
    int max_len = 1;
    for (const auto& b : bodies) max_len = std::max(max_len, static_cast<int>(b.size()));

    ad::Var body_vecs = encode_bodies(tape, pv, cfg, bodies, max_len);
    ad::Var head_b = tape.row_broadcast(enc.head, n);
    ad::Var pooled_b = tape.row_broadcast(enc.pooled, n);
    ad::Var qrel = tape.row_broadcast(tape.gather_rows(pv.rel_emb, {static_cast<int>(query_relation)}), n);
    ad::Var feats = tape.constant(static_feats);

    const ad::Var parts[] = {head_b, pooled_b, qrel, body_vecs, feats};
    ad::Var x = tape.concat_cols(parts);
    ad::Var hidden = tape.relu(tape.add_rowvec(tape.matmul(x, pv.mlp_w1), pv.mlp_b1));
    hidden = tape.dropout(hidden, cfg.dropout, rng, training);
    return tape.add_rowvec(tape.matmul(hidden, pv.mlp_w2), pv.mlp_b2);
}

std::pair<Eigen::RowVectorXd, Eigen::RowVectorXd> encode_subgraph_eval(const ModelParams& params, const Subgraph& sg) {
    ad::Tape tape;
    ParamVars pv = make_param_vars(tape, params, nullptr);
    MessageAdjacency adj = build_message_adjacency(sg);
    Rng rng(0);
    SubgraphEncoding enc = encode_subgraph(tape, pv, params.cfg, sg, adj, false, rng);
    return {enc.head.val().row(0), enc.pooled.val().row(0)};
}

Eigen::RowVectorXd encode_body_eval(const ModelParams& params, const std::vector<RelationId>& body, int batch_max_len) {
    ad::Tape tape;
    ParamVars pv = make_param_vars(tape, params, nullptr);
    const std::vector<std::vector<RelationId>> bodies{body};
    ad::Var h = encode_bodies(tape, pv, params.cfg, bodies, batch_max_len);
    return h.val().row(0);
}

std::vector<double> score_many_eval(const ModelParams& params, const Subgraph& sg, RelationId query_relation,
                                    std::span<const std::vector<RelationId>> bodies, const ad::Mat& static_feats) {
    ad::Tape tape;
    ParamVars pv = make_param_vars(tape, params, nullptr);
    MessageAdjacency adj = build_message_adjacency(sg);
    Rng rng(0);
    SubgraphEncoding enc = encode_subgraph(tape, pv, params.cfg, sg, adj, false, rng);
    ad::Var scores = score_rules(tape, pv, params.cfg, enc, query_relation, bodies, static_feats, false, rng);
    std::vector<double> out(bodies.size());
    for (std::size_t i = 0; i < bodies.size(); ++i) out[i] = scores.val()(static_cast<Eigen::Index>(i), 0);
    return out;
}

double score_eval(const ModelParams& params, const Subgraph& sg, RelationId query_relation,
                  const std::vector<RelationId>& body, const Eigen::RowVector4d& feats) {
    ad::Mat f(1, kStaticDim);
    f.row(0) = feats;
    const std::vector<std::vector<RelationId>> bodies{body};
    return score_many_eval(params, sg, query_relation, bodies, f)[0];
}

namespace {

const RuleStats& stats_or_throw(const RuleBase& rb, RelationId head, const std::vector<RelationId>& body) {
    const RuleStats* s = rb.find(head, body);
    if (!s) throw UserError("instance references a rule missing from the rule base");
    return *s;
}

}  // namespace

double batch_loss(const ModelParams& params, std::span<const TrainingRecord> records, const SubgraphStore& store,
                  const RuleBase& rule_base, const KnowledgeGraph& g, double epsilon, bool training,
                  std::uint64_t dropout_seed, ModelParams* grads) {
    if (records.empty()) return 0.0;
    if (grads) {
        for (auto& [name, mat] : grads->tensors()) {
            (void)name;
            mat->setZero();
        }
    }

    ad::Tape tape;
    ParamVars pv = make_param_vars(tape, params, grads);
    Rng dropout_rng(dropout_seed);

    // Keep adjacency and masked subgraphs alive until backward completes.
    std::deque<Subgraph> masked;
    std::deque<MessageAdjacency> adjs;

    ad::Var total = tape.constant(ad::Mat::Zero(1, 1));
    std::int64_t pairs = 0;
    for (const TrainingRecord& rec : records) {
        const Triple& q = rec.query;
        masked.push_back(remove_target_edge(store.at(q.head), g, q.head, q.relation, q.tail));
        adjs.push_back(build_message_adjacency(masked.back()));
        SubgraphEncoding enc = encode_subgraph(tape, pv, params.cfg, masked.back(), adjs.back(), training, dropout_rng);

        std::vector<std::vector<RelationId>> bodies;
        bodies.reserve(1 + rec.negatives.size());
        bodies.push_back(rec.positive);
        for (const auto& nb : rec.negatives) bodies.push_back(nb);
        ad::Mat feats(static_cast<Eigen::Index>(bodies.size()), kStaticDim);
        feats.row(0) = static_features(stats_or_throw(rule_base, q.relation, rec.positive));
        for (std::size_t i = 0; i < rec.negatives.size(); ++i) {
            feats.row(static_cast<Eigen::Index>(i + 1)) = static_features(stats_or_throw(rule_base, q.relation, rec.negatives[i]));
        }

        ad::Var scores = score_rules(tape, pv, params.cfg, enc, q.relation, bodies, feats, training, dropout_rng);
        const int n_neg = static_cast<int>(rec.negatives.size());
        ad::Var pos = tape.row(scores, 0);
        ad::Var negs = tape.rows_range(scores, 1, 1 + n_neg);
        ad::Var hinge = tape.relu(tape.add_const(tape.sub(negs, tape.row_broadcast(pos, n_neg)), epsilon));
        total = tape.add(total, tape.sum_all(hinge));
        pairs += n_neg;
    }

    ad::Var mean = tape.scale(total, 1.0 / static_cast<double>(pairs));
    const double loss = mean.val()(0, 0);
    if (grads) tape.backward(mean);
    return loss;
}

void adam_step(ModelParams& params, ModelParams& grads, AdamState& state, const AdamConfig& cfg) {
    state.step += 1;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
    auto p = params.tensors();
    auto gt = grads.tensors();
    auto mt = state.m.tensors();
    auto vt = state.v.tensors();
    for (std::size_t i = 0; i < p.size(); ++i) {
        ad::Mat& w = *p[i].second;
        const ad::Mat& grad = *gt[i].second;
        ad::Mat& m = *mt[i].second;
        ad::Mat& v = *vt[i].second;
        m = cfg.beta1 * m + (1.0 - cfg.beta1) * grad;
        v = cfg.beta2 * v.array().matrix() + (1.0 - cfg.beta2) * grad.array().square().matrix();
        const ad::Mat m_hat = m / bc1;
        const ad::Mat v_hat = v / bc2;
        w.array() -= cfg.lr * m_hat.array() / (v_hat.array().sqrt() + cfg.eps);
    }
}

TrainResult train(ModelParams& params, AdamState& adam, const std::vector<TrainingRecord>& records,
                  const SubgraphStore& store, const RuleBase& rule_base, const KnowledgeGraph& g,
                  const TrainConfig& cfg) {
    if (records.empty()) throw UserError("no training instances; rerun the instances stage");
    ModelParams grads = params.zeros_like();
    AdamConfig adam_cfg;
    adam_cfg.lr = cfg.lr;

    TrainResult result;
    std::vector<std::size_t> order(records.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        Rng shuffle_rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(epoch)));
        shuffle_rng.shuffle(order);

        double loss_sum = 0.0;
        std::int64_t batches = 0;
        std::vector<TrainingRecord> batch;
        for (std::size_t at = 0; at < order.size(); at += static_cast<std::size_t>(cfg.batch_size)) {
            batch.clear();
            const std::size_t end = std::min(order.size(), at + static_cast<std::size_t>(cfg.batch_size));
            for (std::size_t i = at; i < end; ++i) batch.push_back(records[order[i]]);

            const std::uint64_t dropout_seed = mix_seed(cfg.seed, 0x0dadULL + static_cast<std::uint64_t>(result.steps));
            const double loss =
                batch_loss(params, batch, store, rule_base, g, cfg.epsilon, true, dropout_seed, &grads);
            if (!std::isfinite(loss)) {
                throw std::runtime_error("non-finite loss at epoch " + std::to_string(epoch) + " step " +
                                         std::to_string(result.steps) + " (batch of " + std::to_string(batch.size()) +
                                         " records)");
            }
            adam_step(params, grads, adam, adam_cfg);
            loss_sum += loss;
            ++batches;
            ++result.steps;
        }
        result.epoch_loss.push_back(batches ? loss_sum / static_cast<double>(batches) : 0.0);
        if (cfg.verbose) {
            std::fprintf(stderr, "epoch %d mean loss %.6f\n", epoch + 1, result.epoch_loss.back());
        }
    }
    return result;
}

namespace {

constexpr std::uint32_t kCkptMagic = 0x534c434b;  // "SLCK"
constexpr std::uint32_t kCkptVersion = 1;

template <typename T>
void write_pod(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw UserError("checkpoint truncated");
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
    if (!in) throw UserError("checkpoint truncated");
    return s;
}

void write_mat(std::ofstream& out, const std::string& name, const ad::Mat& m) {
    write_string(out, name);
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(m.rows()));
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(m.cols()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) write_pod<double>(out, m(i, j));
    }
}

void read_mat_into(std::ifstream& in, const std::string& expected_name, ad::Mat& m) {
    const std::string name = read_string(in);
    if (name != expected_name) throw UserError("checkpoint tensor mismatch: expected " + expected_name + ", got " + name);
    const auto rows = read_pod<std::uint32_t>(in);
    const auto cols = read_pod<std::uint32_t>(in);
    m.resize(rows, cols);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = read_pod<double>(in);
    }
}

void write_params(std::ofstream& out, const ModelParams& params) {
    auto ts = params.tensors();
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(ts.size()));
    for (const auto& [name, mat] : ts) write_mat(out, name, *mat);
}

void read_params_into(std::ifstream& in, ModelParams& params) {
    auto ts = params.tensors();
    const auto n = read_pod<std::uint32_t>(in);
    if (n != ts.size()) throw UserError("checkpoint tensor count mismatch");
    for (auto& [name, mat] : ts) read_mat_into(in, name, *mat);
}

}  // namespace

void save_checkpoint(const std::string& path, const ModelParams& params, const AdamState* adam,
                     const std::map<std::string, std::string>& snapshot) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw UserError("cannot write checkpoint: " + path);
    write_pod(out, kCkptMagic);
    write_pod(out, kCkptVersion);
    write_pod<std::int32_t>(out, params.cfg.dim);
    write_pod<std::int32_t>(out, params.cfg.gnn_layers);
    write_pod<std::int32_t>(out, params.cfg.mlp_hidden);
    write_pod<std::int32_t>(out, params.cfg.num_relations_aug);
    write_pod<double>(out, params.cfg.dropout);
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(snapshot.size()));
    for (const auto& [k, v] : snapshot) {
        write_string(out, k);
        write_string(out, v);
    }
    write_params(out, params);
    write_pod<std::uint8_t>(out, adam ? 1 : 0);
    if (adam) {
        write_pod<std::int64_t>(out, adam->step);
        write_params(out, adam->m);
        write_params(out, adam->v);
    }
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UserError("cannot open checkpoint: " + path);
    if (read_pod<std::uint32_t>(in) != kCkptMagic) throw UserError("not a checkpoint file: " + path);
    if (read_pod<std::uint32_t>(in) != kCkptVersion) throw UserError("unsupported checkpoint version: " + path);
    ModelConfig cfg;
    cfg.dim = read_pod<std::int32_t>(in);
    cfg.gnn_layers = read_pod<std::int32_t>(in);
    cfg.mlp_hidden = read_pod<std::int32_t>(in);
    cfg.num_relations_aug = read_pod<std::int32_t>(in);
    cfg.dropout = read_pod<double>(in);

    Checkpoint ck;
    const auto n_snap = read_pod<std::uint32_t>(in);
    for (std::uint32_t i = 0; i < n_snap; ++i) {
        std::string k = read_string(in);
        ck.snapshot[k] = read_string(in);
    }
    ck.params = ModelParams::init(cfg, 0);
    read_params_into(in, ck.params);
    ck.has_adam = read_pod<std::uint8_t>(in) != 0;
    if (ck.has_adam) {
        ck.adam = AdamState(ck.params);
        ck.adam.step = read_pod<std::int64_t>(in);
        read_params_into(in, ck.adam.m);
        read_params_into(in, ck.adam.v);
    }
    return ck;
}

}  // namespace slogic
