#include <doctest.h>

#include "slogic/tape.hpp"

using namespace slogic;
using ad::Mat;

namespace {

Mat random_mat(int r, int c, Rng& rng) {
    Mat m(r, c);
    for (int i = 0; i < r; ++i) {
        for (int j = 0; j < c; ++j) m(i, j) = rng.normal() * 0.5;
    }
    return m;
}

// Central finite differences of fn against the analytic gradient of the
// same scalar function, for every entry of every input.
void check_gradients(std::vector<Mat> inputs, const std::function<ad::Var(ad::Tape&, std::vector<ad::Var>&)>& fn,
                     double tol = 1e-6) {
    std::vector<Mat> grads(inputs.size());
    for (std::size_t i = 0; i < inputs.size(); ++i) grads[i] = Mat::Zero(inputs[i].rows(), inputs[i].cols());

    {
        ad::Tape tape;
        std::vector<ad::Var> vars;
        for (std::size_t i = 0; i < inputs.size(); ++i) vars.push_back(tape.leaf(&inputs[i], &grads[i]));
        ad::Var out = fn(tape, vars);
        tape.backward(out);
    }

    const double h = 1e-5;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        for (Eigen::Index r = 0; r < inputs[i].rows(); ++r) {
            for (Eigen::Index c = 0; c < inputs[i].cols(); ++c) {
                auto eval = [&](double delta) {
                    inputs[i](r, c) += delta;
                    ad::Tape tape;
                    std::vector<ad::Var> vars;
                    for (std::size_t k = 0; k < inputs.size(); ++k) vars.push_back(tape.leaf(&inputs[k], nullptr));
                    const double v = fn(tape, vars).val()(0, 0);
                    inputs[i](r, c) -= delta;
                    return v;
                };
                const double fd = (eval(h) - eval(-h)) / (2.0 * h);
                CHECK(grads[i](r, c) == doctest::Approx(fd).epsilon(1e-4).scale(std::max(1.0, std::abs(fd))));
                (void)tol;
            }
        }
    }
}

}  // namespace

TEST_CASE("matmul + bias + activations gradient") {
    Rng rng(1);
    check_gradients({random_mat(3, 4, rng), random_mat(4, 2, rng), random_mat(1, 2, rng)},
                    [](ad::Tape& t, std::vector<ad::Var>& v) {
                        return t.sum_all(t.tanh(t.add_rowvec(t.matmul(v[0], v[1]), v[2])));
                    });
}

TEST_CASE("sigmoid, relu, hadamard, scale gradient") {
    Rng rng(2);
    check_gradients({random_mat(2, 3, rng), random_mat(2, 3, rng)}, [](ad::Tape& t, std::vector<ad::Var>& v) {
        ad::Var a = t.sigmoid(v[0]);
        ad::Var b = t.relu(v[1]);
        return t.sum_all(t.scale(t.hadamard(a, b), 1.7));
    });
}

TEST_CASE("sub, add_const, mean_rows, row ops gradient") {
    Rng rng(3);
    check_gradients({random_mat(4, 3, rng), random_mat(4, 3, rng)}, [](ad::Tape& t, std::vector<ad::Var>& v) {
        ad::Var d = t.add_const(t.sub(v[0], v[1]), 0.25);
        ad::Var m = t.mean_rows(d);                       // 1 x 3
        ad::Var b = t.row_broadcast(m, 4);                // 4 x 3
        ad::Var r = t.row(t.rows_range(b, 1, 3), 0);      // 1 x 3
        return t.sum_all(t.hadamard(r, t.row(v[0], 2)));
    });
}

TEST_CASE("concat and gather gradient") {
    Rng rng(4);
    check_gradients({random_mat(5, 3, rng), random_mat(2, 3, rng)}, [](ad::Tape& t, std::vector<ad::Var>& v) {
        ad::Var g = t.gather_rows(v[0], {4, 0, 2});  // 3 x 3
        ad::Var cat = t.concat_cols(std::vector<ad::Var>{g, t.gather_rows(v[1], {1, 1, 0})});
        return t.sum_all(t.tanh(cat));
    });
}

TEST_CASE("spmm and col_mask gradient") {
    Rng rng(5);
    ad::SparseCoeffs coeffs;
    coeffs.rows = 3;
    coeffs.cols = 3;
    coeffs.row_entries = {{{1, 0.5}, {2, 0.5}}, {}, {{0, 1.0}}};
    Eigen::VectorXd mask(3);
    mask << 1.0, 0.0, 1.0;
    check_gradients({random_mat(3, 2, rng)}, [&](ad::Tape& t, std::vector<ad::Var>& v) {
        return t.sum_all(t.col_mask(t.spmm(coeffs, v[0]), mask));
    });
}

TEST_CASE("repeated use of one variable accumulates gradient") {
    Rng rng(6);
    check_gradients({random_mat(2, 2, rng)}, [](ad::Tape& t, std::vector<ad::Var>& v) {
        return t.sum_all(t.matmul(v[0], v[0]));
    });
}

TEST_CASE("dropout scales by 1/keep and is identity in eval mode") {
    Mat x = Mat::Ones(50, 40);
    ad::Tape tape;
    ad::Var v = tape.constant(x);
    Rng rng(7);
    ad::Var eval_out = tape.dropout(v, 0.5, rng, false);
    CHECK(eval_out.val() == x);
    ad::Var train_out = tape.dropout(v, 0.5, rng, true);
    double sum = train_out.val().sum();
    // Inverted dropout keeps the expectation: mean stays near 1.
    CHECK(sum / 2000.0 == doctest::Approx(1.0).epsilon(0.1));
    for (Eigen::Index i = 0; i < 50; ++i) {
        for (Eigen::Index j = 0; j < 40; ++j) {
            const double e = train_out.val()(i, j);
            CHECK((e == 0.0 || e == doctest::Approx(2.0)));
        }
    }
}

TEST_CASE("backward requires a scalar") {
    ad::Tape tape;
    ad::Var v = tape.constant(Mat::Ones(2, 2));
    CHECK_THROWS_AS(tape.backward(v), std::logic_error);
}
