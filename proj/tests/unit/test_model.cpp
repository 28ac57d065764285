#include "medplex/model.hpp"

#include "gradient_suite.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <set>

using namespace medplex;

TEST_CASE("normalized adjacency examples") {
    RelationGraph single;
    single.n = 1;
    CHECK(normalize_adjacency(single).to_dense() == Matrix::Ones(1, 1));

    RelationGraph pair;
    pair.n = 2;
    pair.edges = {{0, 1, 1.0}};
    CHECK(normalize_adjacency(pair).to_dense() == Matrix::Constant(2, 2, 0.5));

    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 10; ++trial) {
        const auto op = normalize_adjacency(build_relation_graph(testing::random_matrix(20, 3, rng), 0.1 * trial));
        const Matrix a = op.to_dense();
        CHECK(a == a.transpose());
        CHECK(a.rowwise().sum().minCoeff() > 0.0);
    }
}

TEST_CASE("gcn forward examples") {
    RelationGraph g;
    g.n = 3;
    const auto op = normalize_adjacency(g);
    Matrix x(3, 2);
    x << 1, 2, 0, 3, 4, 0.5;
    CHECK(gcn_forward(op, x, Matrix::Identity(2, 2)).out == x);
    CHECK(gcn_forward(op, x, -Matrix::Identity(2, 2)).out == Matrix::Zero(3, 2));
}

TEST_CASE("readout and discriminator examples") {
    const Vector s0 = readout_summary(Matrix::Zero(5, 3));
    CHECK((s0.array() - 0.5).abs().maxCoeff() == 0.0);
    Matrix one(1, 2);
    one << 0.3, -2.0;
    const Vector s1 = readout_summary(one);
    CHECK(s1(0) == doctest::Approx(logistic(0.3)));
    CHECK(s1(1) == doctest::Approx(logistic(-2.0)));

    const Vector s = Vector::Unit(3, 0);
    CHECK(discriminate(Vector::Zero(3), s, Matrix::Identity(3, 3)) == 0.5);
    CHECK(discriminate(s, s, Matrix::Identity(3, 3)) == doctest::Approx(0.73106).epsilon(1e-5));
}

TEST_CASE("corruption permutes rows and preserves the row multiset") {
    Matrix single(1, 3);
    single << 1, 2, 3;
    CHECK(corrupt_features(single, 5) == single);

    std::mt19937_64 rng(2);
    const Matrix x = testing::random_matrix(30, 4, rng);
    const Matrix xt = corrupt_features(x, 9);
    CHECK(xt != x);
    auto rows_of = [](const Matrix& m) {
        std::multiset<std::vector<double>> out;
        for (Eigen::Index i = 0; i < m.rows(); ++i) out.insert(std::vector<double>(m.row(i).begin(), m.row(i).end()));
        return out;
    };
    CHECK(rows_of(x) == rows_of(xt));
    CHECK(corrupt_features(x, 9) == xt);
    const auto perm = corruption_permutation(30, 9);
    CHECK(permute_rows(x, perm) == xt);
}

TEST_CASE("attentive pooling examples") {
    std::mt19937_64 rng(3);
    const std::vector<Matrix> hs{testing::random_matrix(6, 3, rng), testing::random_matrix(6, 3, rng),
                                 testing::random_matrix(6, 3, rng)};
    const auto uniform = attentive_pool(hs, Vector::Constant(3, 0.7));
    CHECK((uniform.pooled - (hs[0] + hs[1] + hs[2]) / 3.0).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(uniform.weights.sum() == doctest::Approx(1.0).epsilon(1e-12));

    Vector sat(3);
    sat << 0.0, 35.0, 2.0;
    const auto peaked = attentive_pool(hs, sat);
    CHECK((peaked.pooled - hs[1]).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK(std::abs(peaked.weights.sum() - 1.0) <= 1e-9);

    Vector shifted = sat.array() + 100.0;
    CHECK((attentive_pool(hs, shifted).weights - peaked.weights).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("classifier examples") {
    std::mt19937_64 rng(4);
    const Matrix o = testing::random_matrix(5, 4, rng);
    const Matrix y = classify(o, Matrix::Zero(4, 3), Vector::Zero(3));
    CHECK((y.array() - 1.0 / 3.0).abs().maxCoeff() <= 1e-15);

    const Matrix w = testing::random_matrix(4, 3, rng);
    const Vector b = testing::random_matrix(3, 1, rng);
    const Matrix y1 = classify(o, w, b);
    const Matrix y2 = classify(o, w, (b.array() + 4.0).matrix());
    for (Eigen::Index i = 0; i < 5; ++i) {
        Eigen::Index a = 0;
        Eigen::Index c = 0;
        y1.row(i).maxCoeff(&a);
        y2.row(i).maxCoeff(&c);
        CHECK(a == c);
        CHECK(y1.row(i).sum() == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("model state initialization is seeded and finite") {
    const ModelDims dims{10, 6, 4, 2, 3};
    const auto a = ModelState::initialize(dims, 1);
    const auto b = ModelState::initialize(dims, 1);
    const auto c = ModelState::initialize(dims, 2);
    CHECK(a.params.encoders[1] == b.params.encoders[1]);
    CHECK(a.params.encoders[1] != c.params.encoders[1]);
    CHECK(a.params.consensus.rows() == 10);
    CHECK(a.params.classifier.cols() == 3);
    a.check_finite();
    auto bad = a;
    bad.params.classifier(0, 0) = std::nan("");
    CHECK_THROWS_AS(bad.check_finite(), NumericError);
}

TEST_CASE("analytic gradients match central differences") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        for (const auto& c : gradient_suite::run(seed)) {
            INFO(c.name << " seed " << seed);
            CHECK(c.error <= 1e-4);
        }
    }
}
