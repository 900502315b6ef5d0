#include "slogic/tape.hpp"

#include <cassert>
#include <stdexcept>

namespace slogic::ad {

Mat SparseCoeffs::apply(const Mat& h) const {
    Mat out = Mat::Zero(rows, h.cols());
    for (int v = 0; v < rows; ++v) {
        for (const auto& [u, w] : row_entries[static_cast<std::size_t>(v)]) {
            out.row(v) += w * h.row(u);
        }
    }
    return out;
}

Mat SparseCoeffs::apply_transposed(const Mat& g) const {
    Mat out = Mat::Zero(cols, g.cols());
    for (int v = 0; v < rows; ++v) {
        for (const auto& [u, w] : row_entries[static_cast<std::size_t>(v)]) {
            out.row(u) += w * g.row(v);
        }
    }
    return out;
}

const Mat& Tape::value(Var v) const {
    const Node& n = nodes_.at(static_cast<std::size_t>(v.idx));
    return n.external ? *n.external : n.value;
}

Var Tape::push(Mat value, std::function<void(Tape&, const Mat&)> back) {
    Node n;
    n.value = std::move(value);
    n.back = std::move(back);
    nodes_.push_back(std::move(n));
    return Var{static_cast<std::int32_t>(nodes_.size() - 1), this};
}

Var Tape::leaf(const Mat* value, Mat* grad) {
    Node n;
    n.external = value;
    n.grad_external = grad;
    nodes_.push_back(std::move(n));
    return Var{static_cast<std::int32_t>(nodes_.size() - 1), this};
}

Var Tape::constant(Mat value) { return push(std::move(value), nullptr); }

Mat& Tape::grad_of(Var v) {
    Node& n = nodes_[static_cast<std::size_t>(v.idx)];
    if (n.grad_external) return *n.grad_external;
    if (!n.has_grad) {
        n.grad = Mat::Zero(value(v).rows(), value(v).cols());
    }
    return n.grad;
}

void Tape::accumulate(Var v, const Mat& g) {
    Node& n = nodes_[static_cast<std::size_t>(v.idx)];
    grad_of(v) += g;
    n.has_grad = true;
}

void Tape::backward(Var out) {
    if (value(out).rows() != 1 || value(out).cols() != 1) {
        throw std::logic_error("backward requires a scalar output");
    }
    accumulate(out, Mat::Ones(1, 1));
    for (std::int32_t i = out.idx; i >= 0; --i) {
        Node& n = nodes_[static_cast<std::size_t>(i)];
        if (!n.has_grad || !n.back) continue;
        const Mat g = n.grad_external ? *n.grad_external : n.grad;
        n.back(*this, g);
    }
}

Var Tape::matmul(Var a, Var b) {
    Mat v = value(a) * value(b);
    return push(std::move(v), [a, b](Tape& t, const Mat& g) {
        t.accumulate(a, g * t.value(b).transpose());
        t.accumulate(b, t.value(a).transpose() * g);
    });
}

Var Tape::add(Var a, Var b) {
    Mat v = value(a) + value(b);
    return push(std::move(v), [a, b](Tape& t, const Mat& g) {
        t.accumulate(a, g);
        t.accumulate(b, g);
    });
}

Var Tape::sub(Var a, Var b) {
    Mat v = value(a) - value(b);
    return push(std::move(v), [a, b](Tape& t, const Mat& g) {
        t.accumulate(a, g);
        t.accumulate(b, -g);
    });
}

Var Tape::add_rowvec(Var a, Var bias) {
    Mat v = value(a);
    v.rowwise() += value(bias).row(0);
    return push(std::move(v), [a, bias](Tape& t, const Mat& g) {
        t.accumulate(a, g);
        t.accumulate(bias, g.colwise().sum());
    });
}

Var Tape::hadamard(Var a, Var b) {
    Mat v = value(a).cwiseProduct(value(b));
    return push(std::move(v), [a, b](Tape& t, const Mat& g) {
        t.accumulate(a, g.cwiseProduct(t.value(b)));
        t.accumulate(b, g.cwiseProduct(t.value(a)));
    });
}

Var Tape::scale(Var a, double c) {
    Mat v = value(a) * c;
    return push(std::move(v), [a, c](Tape& t, const Mat& g) { t.accumulate(a, g * c); });
}

Var Tape::add_const(Var a, double c) {
    Mat v = value(a).array() + c;
    return push(std::move(v), [a](Tape& t, const Mat& g) { t.accumulate(a, g); });
}

Var Tape::sigmoid(Var a) {
    Mat v = (1.0 / (1.0 + (-value(a).array()).exp())).matrix();
    Var out = push(std::move(v), nullptr);
    nodes_.back().back = [a, out](Tape& t, const Mat& g) {
        const Mat& y = t.value(out);
        t.accumulate(a, g.cwiseProduct(y.cwiseProduct(Mat::Ones(y.rows(), y.cols()) - y)));
    };
    return out;
}

Var Tape::tanh(Var a) {
    Mat v = value(a).array().tanh().matrix();
    Var out = push(std::move(v), nullptr);
    nodes_.back().back = [a, out](Tape& t, const Mat& g) {
        const Mat& y = t.value(out);
        t.accumulate(a, g.cwiseProduct((1.0 - y.array().square()).matrix()));
    };
    return out;
}

Var Tape::relu(Var a) {
    Mat v = value(a).cwiseMax(0.0);
    return push(std::move(v), [a](Tape& t, const Mat& g) {
        const Mat mask = (t.value(a).array() > 0.0).cast<double>().matrix();
        t.accumulate(a, g.cwiseProduct(mask));
    });
}

Var Tape::mean_rows(Var a) {
    const auto n = static_cast<double>(value(a).rows());
    Mat v = value(a).colwise().mean();
    return push(std::move(v), [a, n](Tape& t, const Mat& g) {
        Mat ga = Mat::Zero(t.value(a).rows(), t.value(a).cols());
        ga.rowwise() += g.row(0) / n;
        t.accumulate(a, ga);
    });
}

Var Tape::sum_all(Var a) {
    Mat v(1, 1);
    v(0, 0) = value(a).sum();
    return push(std::move(v), [a](Tape& t, const Mat& g) {
        t.accumulate(a, Mat::Constant(t.value(a).rows(), t.value(a).cols(), g(0, 0)));
    });
}

Var Tape::concat_cols(std::span<const Var> parts) {
    if (parts.empty()) throw std::logic_error("concat_cols needs at least one input");
    const auto rows = value(parts[0]).rows();
    Eigen::Index cols = 0;
    for (Var p : parts) cols += value(p).cols();
    Mat v(rows, cols);
    Eigen::Index at = 0;
    for (Var p : parts) {
        v.middleCols(at, value(p).cols()) = value(p);
        at += value(p).cols();
    }
    std::vector<Var> owned(parts.begin(), parts.end());
    return push(std::move(v), [owned](Tape& t, const Mat& g) {
        Eigen::Index at = 0;
        for (Var p : owned) {
            const auto c = t.value(p).cols();
            t.accumulate(p, g.middleCols(at, c));
            at += c;
        }
    });
}

Var Tape::row(Var a, int i) {
    Mat v = value(a).row(i);
    return push(std::move(v), [a, i](Tape& t, const Mat& g) {
        Mat ga = Mat::Zero(t.value(a).rows(), t.value(a).cols());
        ga.row(i) = g.row(0);
        t.accumulate(a, ga);
    });
}

Var Tape::rows_range(Var a, int begin, int end) {
    Mat v = value(a).middleRows(begin, end - begin);
    return push(std::move(v), [a, begin, end](Tape& t, const Mat& g) {
        Mat ga = Mat::Zero(t.value(a).rows(), t.value(a).cols());
        ga.middleRows(begin, end - begin) = g;
        t.accumulate(a, ga);
    });
}

Var Tape::row_broadcast(Var a, int n) {
    Mat v(n, value(a).cols());
    v.rowwise() = value(a).row(0);
    return push(std::move(v), [a](Tape& t, const Mat& g) { t.accumulate(a, g.colwise().sum()); });
}

Var Tape::gather_rows(Var table, std::vector<int> ids) {
    Mat v(static_cast<Eigen::Index>(ids.size()), value(table).cols());
    for (std::size_t i = 0; i < ids.size(); ++i) v.row(static_cast<Eigen::Index>(i)) = value(table).row(ids[i]);
    return push(std::move(v), [table, ids](Tape& t, const Mat& g) {
        Mat gt = Mat::Zero(t.value(table).rows(), t.value(table).cols());
        for (std::size_t i = 0; i < ids.size(); ++i) gt.row(ids[i]) += g.row(static_cast<Eigen::Index>(i));
        t.accumulate(table, gt);
    });
}

Var Tape::col_mask(Var a, Eigen::VectorXd mask) {
    Mat v = mask.asDiagonal() * value(a);
    return push(std::move(v), [a, mask](Tape& t, const Mat& g) { t.accumulate(a, mask.asDiagonal() * g); });
}

Var Tape::spmm(const SparseCoeffs& adj, Var h) {
    Mat v = adj.apply(value(h));
    const SparseCoeffs* p = &adj;  // caller keeps adjacency alive for the tape's lifetime
    return push(std::move(v), [p, h](Tape& t, const Mat& g) { t.accumulate(h, p->apply_transposed(g)); });
}

Var Tape::dropout(Var a, double rate, Rng& rng, bool training) {
    if (!training || rate <= 0.0) return a;
    const double keep = 1.0 - rate;
    Mat mask(value(a).rows(), value(a).cols());
    for (Eigen::Index i = 0; i < mask.rows(); ++i) {
        for (Eigen::Index j = 0; j < mask.cols(); ++j) {
            mask(i, j) = rng.uniform() < keep ? 1.0 / keep : 0.0;
        }
    }
    Mat v = value(a).cwiseProduct(mask);
    return push(std::move(v), [a, mask](Tape& t, const Mat& g) { t.accumulate(a, g.cwiseProduct(mask)); });
}

}  // namespace slogic::ad
