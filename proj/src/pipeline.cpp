#include "medplex/pipeline.hpp"

#include <algorithm>

namespace medplex {

const char* model_kind_name(ModelKind k) {
    switch (k) {
    case ModelKind::multiplex:
        return "multiplex";
    case ModelKind::mlp:
        return "mlp";
    case ModelKind::single_gcn:
        return "single_gcn";
    }
    return "?";
}

ModelKind parse_model_kind(const std::string& name) {
    if (name == "multiplex") return ModelKind::multiplex;
    if (name == "mlp") return ModelKind::mlp;
    if (name == "single_gcn") return ModelKind::single_gcn;
    throw UsageError("unknown model '" + name + "' (expected multiplex, mlp or single_gcn)");
}

Cohort Cohort::from_synthetic(const SyntheticCohort& s) {
    return {s.features, s.embeddings, s.labels.labels, s.labels.num_classes};
}

LabelVector make_labels(const std::vector<int>& labels, int num_classes, const TrainingConfig& cfg) {
    LabelVector lv;
    lv.labels = labels;
    lv.num_classes = num_classes;
    lv.mask = split_masks(labels, cfg.split, cfg.seed);
    if (cfg.label_fraction > 0.0) lv.mask = restrict_training_labels(lv.mask, labels, cfg.label_fraction, cfg.seed);
    lv.validate();
    return lv;
}

KMeansResult cluster_columns(const FeatureTable& normalized, const TrainingConfig& cfg) {
    KMeansOptions opt;
    opt.k = cfg.clusters;
    opt.restarts = cfg.kmeans_restarts;
    opt.max_iters = cfg.kmeans_max_iters;
    opt.seed = cfg.seed;
    return kmeans_columns(normalized, opt);
}

MultiplexGraph prepare_graph(const Cohort& cohort, const TrainingConfig& cfg,
                             const std::optional<ClusterPartition>& partition) {
    const auto c = normalize_columns(cohort.features);
    EmbeddingTable z = cohort.embeddings;
    ColumnTransform z_transform;
    if (z.cols() > 0) {
        z_transform = fit_column_transform(z.values);
        z.values = z_transform.apply(z.values);
    }
    const auto x = concat_attributes(z, c.table);
    const ClusterPartition p = partition ? *partition : cluster_columns(c.table, cfg).partition;
    if (static_cast<std::size_t>(p.num_types) != cfg.thetas.size()) {
        throw UsageError("partition has " + std::to_string(p.num_types) + " types but the config lists " +
                         std::to_string(cfg.thetas.size()) + " thresholds");
    }
    auto g = build_multiplex(c.table, p, cfg.thetas, x);
    g.feature_transform = c.transform;
    g.embedding_transform = z_transform;
    return g;
}

Cohort select_types(const Cohort& cohort, const ClusterPartition& partition, const std::vector<int>& types,
                    ClusterPartition* kept) {
    if (types.empty()) throw UsageError("feature subset: no types selected");
    std::vector<std::size_t> cols;
    ClusterPartition out;
    out.source = partition.source;
    out.num_types = static_cast<int>(types.size());
    for (std::size_t col = 0; col < partition.assignment.size(); ++col) {
        const auto it = std::find(types.begin(), types.end(), partition.assignment[col]);
        if (it == types.end()) continue;
        cols.push_back(col);
        out.assignment.push_back(static_cast<int>(it - types.begin()));
    }
    for (int t : types) {
        if (t < 0 || t >= partition.num_types) throw UsageError("feature subset: type " + std::to_string(t) + " out of range");
    }
    Cohort c = cohort;
    c.features.values = column_slice(cohort.features.values, cols);
    c.features.column_names.clear();
    c.features.column_kinds.clear();
    for (auto col : cols) {
        c.features.column_names.push_back(cohort.features.column_names[col]);
        c.features.column_kinds.push_back(cohort.features.column_kinds[col]);
    }
    out.validate();
    if (kept != nullptr) *kept = out;
    return c;
}

ExperimentResult run_experiment(const Cohort& cohort, const TrainingConfig& cfg, ModelKind kind,
                                const std::optional<ClusterPartition>& partition) {
    ExperimentResult res;
    res.labels = make_labels(cohort.labels, cohort.num_classes, cfg);
    if (kind == ModelKind::multiplex) {
        const auto g = prepare_graph(cohort, cfg, partition);
        res.partition = g.partition;
        const auto fit_result = fit(g, res.labels, cfg);
        res.predictions = predict(fit_result.state.params);
        res.test = evaluate_split(res.predictions, res.labels, Split::test);
        res.test.attention = fit_result.report.attention;
    } else {
        const auto c = normalize_columns(cohort.features);
        EmbeddingTable z = cohort.embeddings;
        if (z.cols() > 0) z.values = fit_column_transform(z.values).apply(z.values);
        const auto x = concat_attributes(z, c.table);
        const auto fitted = kind == ModelKind::mlp ? fit_mlp(x, res.labels, cfg)
                                                   : fit_single_gcn(x, c.table, res.labels, cfg.baseline_theta(), cfg);
        res.predictions = fitted.model.predict(x.x);
        res.test = evaluate_split(res.predictions, res.labels, Split::test);
    }
    res.test.kind = model_kind_name(kind);
    res.test.seed = cfg.seed;
    res.test.config_hash = cfg.hash();
    return res;
}

} // namespace medplex
