#pragma once
// Reverse-mode gradient tape over Eigen dense matrices. Deliberately small:
// the operator set is exactly what the subgraph encoder, the recurrent body
// encoder and the scoring MLP need. Values are doubles so finite-difference
// checks are meaningful.

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "slogic/rng.hpp"

namespace slogic::ad {

using Mat = Eigen::MatrixXd;

class Tape;

struct Var {
    std::int32_t idx = -1;
    Tape* tape = nullptr;

    const Mat& val() const;
};

// Row-normalized sparse adjacency used by graph-conv message passing;
// constant (never differentiated).
struct SparseCoeffs {
    int rows = 0;
    int cols = 0;
    std::vector<std::vector<std::pair<std::int32_t, double>>> row_entries;

    Mat apply(const Mat& h) const;
    Mat apply_transposed(const Mat& g) const;
};

class Tape {
public:
    // Leaf referencing external storage; gradient accumulates into *grad.
    Var leaf(const Mat* value, Mat* grad);
    // Constant owned by the tape (no gradient).
    Var constant(Mat value);

    Var matmul(Var a, Var b);
    Var add(Var a, Var b);                // same shape
    Var sub(Var a, Var b);                // same shape
    Var add_rowvec(Var a, Var bias);      // bias is 1 x c, broadcast over rows
    Var hadamard(Var a, Var b);           // same shape
    Var scale(Var a, double c);
    Var add_const(Var a, double c);
    Var sigmoid(Var a);
    Var tanh(Var a);
    Var relu(Var a);
    Var mean_rows(Var a);                 // n x c -> 1 x c
    Var sum_all(Var a);                   // -> 1 x 1
    Var concat_cols(std::span<const Var> parts);
    Var row(Var a, int i);                // -> 1 x c
    Var rows_range(Var a, int begin, int end);
    Var row_broadcast(Var a, int n);      // 1 x c -> n x c
    Var gather_rows(Var table, std::vector<int> ids);
    Var col_mask(Var a, Eigen::VectorXd mask);  // rows scaled by mask entries
    Var spmm(const SparseCoeffs& adj, Var h);
    Var dropout(Var a, double rate, Rng& rng, bool training);

    // Seeds d(out)=1 and accumulates into every reachable leaf gradient.
    // out must be 1 x 1.
    void backward(Var out);

    const Mat& value(Var v) const;

private:
    struct Node {
        Mat value;                   // owned (empty when external)
        const Mat* external = nullptr;
        Mat grad;                    // lazily sized
        Mat* grad_external = nullptr;
        bool has_grad = false;       // grad storage touched this pass
        std::function<void(Tape&, const Mat&)> back;  // receives d(out)/d(this)
    };

    Var push(Mat value, std::function<void(Tape&, const Mat&)> back);
    Mat& grad_of(Var v);
    void accumulate(Var v, const Mat& g);

    std::vector<Node> nodes_;
};

inline const Mat& Var::val() const { return tape->value(*this); }

}  // namespace slogic::ad
