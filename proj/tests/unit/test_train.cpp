#include "medplex/checkpoint.hpp"
#include "medplex/optimizer.hpp"
#include "medplex/pipeline.hpp"
#include "medplex/train.hpp"

#include "test_support.hpp"

#include <doctest.h>

using namespace medplex;

namespace {

struct Easy {
    Cohort cohort;
    ClusterPartition partition;
};

Easy easy_cohort(std::uint64_t seed) {
    SynthConfig sc;
    sc.n = 150;
    sc.types = {{6, 10.0, {}}, {6, 10.0, {}}};
    sc.noise_std = 0.5;
    sc.seed = seed;
    const auto s = generate_synthetic_cohort(sc);
    ClusterPartition p;
    p.assignment = s.column_types;
    p.num_types = 2;
    p.source = PartitionSource::manual;
    return {Cohort::from_synthetic(s), p};
}

TrainingConfig easy_config() {
    auto cfg = TrainingConfig::preset_named("synth");
    cfg.clusters = 2;
    cfg.thetas = {0.5, 0.5};
    cfg.embedding_dim = 16;
    cfg.epochs = 200;
    return cfg;
}

} // namespace

TEST_CASE("zero epochs returns the initialized state and an empty report") {
    const auto e = easy_cohort(1);
    auto cfg = easy_config();
    cfg.epochs = 0;
    const auto g = prepare_graph(e.cohort, cfg, e.partition);
    const auto labels = make_labels(e.cohort.labels, e.cohort.num_classes, cfg);
    const auto fit_result = fit(g, labels, cfg);
    const auto init = ModelState::initialize(fit_result.state.dims, cfg.seed);
    CHECK(fit_result.report.epochs.empty());
    CHECK(fit_result.state.params.encoders[0] == init.params.encoders[0]);
    CHECK(fit_result.state.params.consensus == init.params.consensus);
}

TEST_CASE("easy cohort reaches high validation accuracy, deterministically") {
    const auto e = easy_cohort(2);
    const auto cfg = easy_config();
    const auto g = prepare_graph(e.cohort, cfg, e.partition);
    const auto labels = make_labels(e.cohort.labels, e.cohort.num_classes, cfg);
    const auto a = fit(g, labels, cfg);
    CHECK(a.report.best_val_micro_f1 >= 0.9);
    CHECK(a.report.epochs.size() <= 200);
    for (const auto& rec : a.report.epochs) CHECK(std::isfinite(rec.total));
    CHECK(std::abs(a.report.attention[0] + a.report.attention[1] - 1.0) <= 1e-9);

    const auto b = fit(g, labels, cfg);
    CHECK(a.state.params.consensus == b.state.params.consensus);
    CHECK(a.report.to_json().dump() == b.report.to_json().dump());
    CHECK(predict(a.state.params) == predict(b.state.params));
}

TEST_CASE("corruption seeds are per epoch and per run") {
    CHECK(epoch_seed(1, 0) == epoch_seed(1, 0));
    CHECK(epoch_seed(1, 0) != epoch_seed(1, 1));
    CHECK(epoch_seed(1, 0) != epoch_seed(2, 0));
}

TEST_CASE("without the supervised term the classifier only feels weight decay") {
    const auto e = easy_cohort(3);
    auto cfg = easy_config();
    const auto g = prepare_graph(e.cohort, cfg, e.partition);
    const auto labels = make_labels(e.cohort.labels, e.cohort.num_classes, cfg);
    const auto data = TrainingData::from(g, labels);
    const auto state = ModelState::initialize(data.dims(8), 4);
    auto grads = Parameters::zeros(state.dims);
    const auto perm = corruption_permutation(data.x.rows(), 1);
    evaluate_objective(data, state.params, perm, {0.5, 0.0, 0.01}, &grads);
    CHECK((grads.classifier - 2.0 * 0.01 * state.params.classifier).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK(grads.classifier_bias.cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("adam closed forms") {
    Parameters p = Parameters::zeros({4, 3, 2, 2, 2});
    std::mt19937_64 rng(5);
    for (auto& b : param_blocks(p)) {
        for (auto& v : b.values) v = std::normal_distribution<double>(0.0, 1.0)(rng);
    }
    const Parameters before = p;
    Parameters g = Parameters::zeros({4, 3, 2, 2, 2});
    Adam adam({0.01});
    adam.step(param_blocks(p), param_blocks(std::as_const(g)));
    CHECK(p.consensus == before.consensus);
    CHECK(p.encoders[1] == before.encoders[1]);

    // First step on fresh moments moves each coordinate by lr * sign(g).
    std::vector<double> x{1.0, -2.0, 0.5};
    std::vector<double> dx{3.0, -0.25, 1e-3};
    Adam first({0.01});
    const std::vector<ParamBlock> xb{{"x", x}};
    const std::vector<ConstParamBlock> gb{{"x", dx}};
    first.step(xb, gb);
    CHECK(std::abs(x[0] - 0.99) <= 1e-6);
    CHECK(std::abs(x[1] + 1.99) <= 1e-6);
    CHECK(std::abs(x[2] - 0.49) <= 1e-6);

    // A quadratic bowl converges.
    std::vector<double> y{4.0, -3.0};
    std::vector<double> dy(2);
    Adam bowl({0.05});
    for (int t = 0; t < 2000; ++t) {
        dy = {2.0 * y[0], 2.0 * y[1]};
        const std::vector<ParamBlock> yb{{"y", y}};
        const std::vector<ConstParamBlock> gyb{{"y", dy}};
        bowl.step(yb, gyb);
    }
    CHECK(std::abs(y[0]) <= 1e-2);
    CHECK(std::abs(y[1]) <= 1e-2);

    std::vector<double> bad{std::nan("")};
    std::vector<double> z{1.0};
    const std::vector<ParamBlock> zb{{"z", z}};
    const std::vector<ConstParamBlock> badb{{"z", bad}};
    CHECK_THROWS_AS(bowl.step(zb, badb), NumericError);
}

TEST_CASE("checkpoints round-trip bit-exactly") {
    const auto dir = testing::temp_dir("train_ckpt");
    const auto state = ModelState::initialize({7, 5, 3, 2, 3}, 11);
    write_checkpoint(dir / "m.ckpt", checkpoint_from_state(state, "abc"));
    const auto ck = read_checkpoint(dir / "m.ckpt");
    CHECK(ck.config_hash == "abc");
    const auto back = state_from_checkpoint(ck);
    CHECK(back.dims == state.dims);
    CHECK(back.seed == 11);
    const auto a = param_blocks(state.params);
    const auto b = param_blocks(back.params);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k].name == b[k].name);
        CHECK(std::equal(a[k].values.begin(), a[k].values.end(), b[k].values.begin(), b[k].values.end()));
    }
    testing::write_text(dir / "bad.ckpt", "garbage");
    CHECK_THROWS_AS(read_checkpoint(dir / "bad.ckpt"), DataError);
}

TEST_CASE("inductive prediction of a duplicated row follows the original") {
    const auto e = easy_cohort(6);
    auto cfg = easy_config();
    cfg.epochs = 60;
    const auto g = prepare_graph(e.cohort, cfg, e.partition);
    const auto labels = make_labels(e.cohort.labels, e.cohort.num_classes, cfg);
    const auto res = fit(g, labels, cfg);
    const auto transductive = predict(res.state.params);

    FeatureTable c_new;
    c_new.values = e.cohort.features.values.topRows(3);
    c_new.column_names = e.cohort.features.column_names;
    c_new.column_kinds = e.cohort.features.column_kinds;
    c_new.row_ids = {"n0", "n1", "n2"};
    EmbeddingTable z_new;
    z_new.values = e.cohort.embeddings.values.topRows(3);
    z_new.row_ids = c_new.row_ids;
    const auto ext = attach_new_nodes(g, c_new, z_new);
    const auto pred = predict_inductive(ext, g.num_nodes(), res.state.params);
    REQUIRE(pred.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) CHECK(pred[i] == transductive[i]);
}
