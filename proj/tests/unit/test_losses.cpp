#include "medplex/losses.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <cmath>

using namespace medplex;

TEST_CASE("infomax loss closed forms") {
    const Matrix zero = Matrix::Zero(4, 3);
    const auto r = infomax_loss(zero, zero, Vector::Constant(3, 0.5), Matrix::Identity(3, 3));
    CHECK(r.loss == doctest::Approx(std::log(2.0)).epsilon(1e-12));

    // Scores pinned near 1 for clean rows and near 0 for corrupted rows.
    const Vector s = Vector::Unit(3, 0);
    Matrix h = Matrix::Zero(4, 3);
    h.col(0).setConstant(40.0);
    const Matrix ht = -h;
    const auto perfect = infomax_loss(h, ht, s, Matrix::Identity(3, 3));
    CHECK(perfect.loss <= 1e-6);
}

TEST_CASE("consensus loss closed forms") {
    std::mt19937_64 rng(1);
    const Matrix o = testing::random_matrix(5, 3, rng);
    CHECK(consensus_loss(o, o, o).loss == 0.0);
    const Matrix shifted = o.array() + 1.0;
    CHECK(consensus_loss(o, o, shifted).loss == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("supervised loss closed forms") {
    const Matrix uniform = Matrix::Constant(4, 3, 1.0 / 3.0);
    const std::vector<int> labels{0, 1, 2, 1};
    const std::vector<std::size_t> rows{0, 1, 2, 3};
    CHECK(supervised_loss(uniform, labels, rows).loss == doctest::Approx(std::log(3.0)).epsilon(1e-12));

    Matrix onehot = Matrix::Zero(4, 3);
    for (std::size_t i = 0; i < 4; ++i) onehot(static_cast<Eigen::Index>(i), labels[i]) = 1.0;
    CHECK(supervised_loss(onehot, labels, rows).loss <= 1e-6);
    CHECK_THROWS(supervised_loss(uniform, labels, {}));
}

TEST_CASE("total loss composition") {
    LossComponents c;
    c.infomax = {0.4, 0.7};
    c.consensus = -0.3;
    c.supervised = 1.2;
    c.l2 = 5.0;
    CHECK(total_loss(c, {0.0, 0.0, 0.0}) == 0.4 + 0.7);
    const LossWeights w{0.001, 0.1, 0.0001};
    CHECK(std::abs(total_loss(c, w) - (0.4 + 0.7 + 0.001 * -0.3 + 0.1 * 1.2 + 0.0001 * 5.0)) <= 1e-12);

    const ModelDims dims{6, 4, 3, 2, 3};
    const auto state = ModelState::initialize(dims, 3);
    c.l2 = -1.0;
    const double expect = 0.4 + 0.7 + w.alpha * c.consensus + w.beta * c.supervised + w.gamma * state.params.squared_norm();
    CHECK(std::abs(total_loss(c, w, state.params) - expect) <= 1e-12);
}

TEST_CASE("contrastive view loss closed forms") {
    const Matrix same = Matrix::Ones(2, 4);
    CHECK(std::abs(micle_loss(same, same, 0.5) - std::log(3.0)) <= 1e-12);
    CHECK(std::abs(micle_loss(same, same, 0.1) - std::log(3.0)) <= 1e-12);

    // Positives share a direction; every negative pair is orthogonal.
    Matrix v1 = Matrix::Zero(2, 2);
    v1(0, 0) = 1.0;
    v1(1, 1) = 1.0;
    const double expect = -std::log(std::exp(10.0) / (std::exp(10.0) + 2.0));
    const double got = micle_loss(v1, v1, 0.1);
    CHECK(std::abs(got - expect) <= 1e-12);
    CHECK(got <= 1e-3);

    std::mt19937_64 rng(2);
    const Matrix a = testing::random_matrix(6, 5, rng);
    const Matrix b = testing::random_matrix(6, 5, rng);
    CHECK(std::abs(micle_loss(a, b, 0.2) - micle_loss(2.0 * a, 2.0 * b, 0.2)) <= 1e-9);
    CHECK_THROWS_AS(micle_loss(a, b, 0.0), UsageError);
}
