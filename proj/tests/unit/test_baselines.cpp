#include "medplex/baselines.hpp"
#include "medplex/metrics.hpp"
#include "medplex/pipeline.hpp"

#include "test_support.hpp"

#include <doctest.h>

using namespace medplex;

namespace {

struct Prepared {
    Cohort cohort;
    NodeAttributes x;
    FeatureTable c;
};

Prepared prepare(const SynthConfig& sc) {
    Prepared p;
    p.cohort = Cohort::from_synthetic(generate_synthetic_cohort(sc));
    p.c = normalize_columns(p.cohort.features).table;
    p.x = concat_attributes(p.cohort.embeddings, p.c);
    return p;
}

double split_accuracy(const std::vector<int>& pred, const LabelVector& labels, Split which) {
    return evaluate_split(pred, labels, which).micro_f1;
}

} // namespace

TEST_CASE("mlp fits a separable two-class cohort perfectly") {
    SynthConfig sc;
    sc.n = 120;
    sc.classes = 2;
    sc.types = {{4, 8.0, {}}};
    sc.noise_std = 0.2;
    sc.seed = 1;
    const auto p = prepare(sc);
    auto cfg = TrainingConfig::preset_named("synth");
    cfg.baseline_epochs = 500;
    cfg.patience = 500;
    const auto labels = make_labels(p.cohort.labels, p.cohort.num_classes, cfg);
    const auto fit = fit_mlp(p.x, labels, cfg);
    CHECK(split_accuracy(fit.model.predict(p.x.x), labels, Split::train) == 1.0);
}

TEST_CASE("mlp stays near chance without signal") {
    SynthConfig sc;
    sc.n = 300;
    sc.types = {{8, 0.0, {}}};
    sc.embedding_separation = 0.0;
    auto cfg = TrainingConfig::preset_named("synth");
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        sc.seed = 40 + seed;
        cfg.seed = seed;
        const auto p = prepare(sc);
        const auto labels = make_labels(p.cohort.labels, p.cohort.num_classes, cfg);
        const auto fit = fit_mlp(p.x, labels, cfg);
        const double acc = split_accuracy(fit.model.predict(p.x.x), labels, Split::test);
        INFO("seed " << seed << " accuracy " << acc);
        CHECK(std::abs(acc - 1.0 / 3.0) <= 0.15);
    }
}

TEST_CASE("baseline objective gradients match central differences") {
    std::mt19937_64 rng(2);
    const Matrix inputs = testing::random_matrix(12, 8, rng);
    auto p = BaselineParams::zeros(8, 5, 3);
    p.w1 = testing::random_matrix(8, 5, rng);
    p.b1 = testing::random_matrix(5, 1, rng);
    p.w2 = testing::random_matrix(5, 3, rng);
    p.b2 = testing::random_matrix(3, 1, rng);
    std::vector<int> labels(12);
    for (int i = 0; i < 12; ++i) labels[static_cast<std::size_t>(i)] = i % 3;
    const std::vector<std::size_t> rows{0, 1, 2, 4, 5, 9};
    auto grads = BaselineParams::zeros(8, 5, 3);
    baseline_objective(inputs, p, labels, rows, 0.05, &grads);
    auto blocks = p.blocks();
    const auto g = std::as_const(grads).blocks();
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        const double err = testing::max_fd_error(blocks[b].values.data(), blocks[b].values.size(), g[b].values.data(),
                                                 [&] { return baseline_objective(inputs, p, labels, rows, 0.05, nullptr).loss; });
        INFO(blocks[b].name);
        CHECK(err <= 1e-4);
    }
}

TEST_CASE("an edgeless single graph reduces to the linear model on X") {
    SynthConfig sc = SynthConfig::two_signal();
    sc.n = 150;
    sc.types = {{10, 0.8, {0, 1, 1}}, {10, 0.8, {1, 0, 1}}};
    sc.seed = 3;
    const auto p = prepare(sc);
    auto cfg = TrainingConfig::preset_named("synth");
    const auto labels = make_labels(p.cohort.labels, p.cohort.num_classes, cfg);
    const auto mlp = fit_mlp(p.x, labels, cfg);
    const auto gcn = fit_single_gcn(p.x, p.c, labels, 1.0, cfg);
    CHECK(gcn.model.op->nnz() == 150);
    const double a = split_accuracy(mlp.model.predict(p.x.x), labels, Split::test);
    const double b = split_accuracy(gcn.model.predict(p.x.x), labels, Split::test);
    CHECK(std::abs(a - b) <= 0.02);
}

TEST_CASE("baselines are deterministic and checkpoint round-trips") {
    SynthConfig sc = SynthConfig::two_signal();
    sc.n = 90;
    sc.types = {{6, 1.0, {0, 1, 1}}, {6, 1.0, {1, 0, 1}}};
    const auto p = prepare(sc);
    auto cfg = TrainingConfig::preset_named("synth");
    cfg.baseline_epochs = 50;
    const auto labels = make_labels(p.cohort.labels, p.cohort.num_classes, cfg);
    const auto a = fit_single_gcn(p.x, p.c, labels, 0.2, cfg);
    const auto b = fit_single_gcn(p.x, p.c, labels, 0.2, cfg);
    CHECK(a.model.params.w1 == b.model.params.w1);
    CHECK(a.report.to_json() == b.report.to_json());

    const auto dir = testing::temp_dir("baseline_ckpt");
    write_checkpoint(dir / "g.ckpt", checkpoint_from_baseline(a.model, "h"));
    const auto back = baseline_from_checkpoint(read_checkpoint(dir / "g.ckpt"), a.model.op);
    CHECK(back.predict(p.x.x) == a.model.predict(p.x.x));
    CHECK_THROWS_AS(baseline_from_checkpoint(read_checkpoint(dir / "g.ckpt"), std::nullopt), DataError);
}

TEST_CASE("all models of one seed share split masks") {
    SynthConfig sc = SynthConfig::two_signal();
    sc.n = 90;
    sc.types = {{6, 1.0, {0, 1, 1}}, {6, 1.0, {1, 0, 1}}};
    const auto cohort = Cohort::from_synthetic(generate_synthetic_cohort(sc));
    auto cfg = TrainingConfig::preset_named("synth");
    cfg.clusters = 2;
    cfg.thetas = {0.3, 0.3};
    cfg.epochs = 5;
    cfg.baseline_epochs = 5;
    const auto m = run_experiment(cohort, cfg, ModelKind::multiplex);
    const auto l = run_experiment(cohort, cfg, ModelKind::mlp);
    const auto g = run_experiment(cohort, cfg, ModelKind::single_gcn);
    CHECK(!m.test.mask_hash.empty());
    CHECK(m.test.mask_hash == l.test.mask_hash);
    CHECK(m.test.mask_hash == g.test.mask_hash);
}
