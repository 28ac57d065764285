#include "medplex/checkpoint.hpp"
#include "medplex/hashing.hpp"
#include "medplex/pipeline.hpp"
#include "medplex/sweep.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace medplex;

namespace {

struct Common {
    std::string config;
    std::string preset = "synth";
    std::optional<std::uint64_t> seed;
    std::string out;
    bool quiet = false;
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--config", c.config, "Training config JSON (keys override the preset)");
    sub->add_option("--preset", c.preset, "Named preset: adni, oasis3, abide, duke, cmmd, synth")->capture_default_str();
    sub->add_option("--seed", c.seed, "Run seed (overrides the config)");
    sub->add_option("--out", c.out, "Output directory")->required();
    sub->add_flag("--quiet", c.quiet, "Suppress progress messages");
}

TrainingConfig resolve_config(const Common& c) {
    TrainingConfig cfg;
    if (c.config.empty()) {
        cfg = TrainingConfig::preset_named(c.preset);
    } else {
        std::ifstream in(c.config);
        if (!in) throw DataError("cannot open config " + c.config);
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw DataError("config " + c.config + ": " + e.what());
        }
        if (j.is_object() && !j.contains("preset")) j["preset"] = c.preset;
        cfg = TrainingConfig::from_json(j);
    }
    if (c.seed) cfg.seed = *c.seed;
    cfg.validate();
    return cfg;
}

void write_json(const fs::path& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

nlohmann::json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

// Collects inputs and outputs of one subcommand and writes manifest.json last.
class Manifest {
public:
    Manifest(std::string command, const Common& common) : command_(std::move(command)), common_(common) {
        fs::create_directories(common_.out);
    }

    void input(const fs::path& p) { inputs_[p.string()] = file_sha256(p); }
    void output(const std::string& name) { outputs_.push_back(name); }
    fs::path path(const std::string& name) const { return fs::path(common_.out) / name; }

    void log(const std::string& msg) const {
        if (!common_.quiet) std::cerr << "[" << command_ << "] " << msg << '\n';
    }

    void finish(const std::string& config_hash, std::uint64_t seed) const {
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        nlohmann::json outs = outputs_;
        outs.push_back("manifest.json");
        write_json(path("manifest.json"), {{"command", command_},
                                           {"config_hash", config_hash},
                                           {"seed", seed},
                                           {"inputs", inputs_},
                                           {"outputs", outs},
                                           {"wall_time_seconds", wall}});
        log("wrote " + std::to_string(outs.size()) + " files to " + common_.out);
    }

private:
    std::string command_;
    const Common& common_;
    std::map<std::string, std::string> inputs_;
    std::vector<std::string> outputs_;
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

Cohort load_cohort(const fs::path& dir, Manifest& m) {
    Cohort c;
    const auto features = dir / "features.csv";
    c.features = load_feature_csv(features);
    m.input(features);
    const auto embeddings = dir / "embeddings.csv";
    if (fs::exists(embeddings)) {
        c.embeddings = load_embedding_csv(embeddings);
        m.input(embeddings);
    } else {
        c.embeddings.row_ids = c.features.row_ids;
        c.embeddings.values.resize(static_cast<Eigen::Index>(c.features.rows()), 0);
    }
    const auto labels = dir / "labels.csv";
    c.labels = load_labels_csv(labels, c.features.row_ids);
    m.input(labels);
    for (int y : c.labels) c.num_classes = std::max(c.num_classes, y + 1);
    if (c.num_classes < 1) throw DataError(labels.string() + ": no labeled rows");
    return c;
}

ClusterPartition load_partition(const fs::path& path, const FeatureTable& c, Manifest& m) {
    const auto j = read_json(path);
    m.input(path);
    return partition_from_export(j, c.column_names);
}

void write_splits(const fs::path& path, const std::vector<std::string>& ids, const std::vector<Split>& mask) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    out << "id,split\n";
    for (std::size_t i = 0; i < ids.size(); ++i) out << ids[i] << ',' << split_name(mask[i]) << '\n';
}

std::vector<Split> read_splits(const fs::path& path, const std::vector<std::string>& ids) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    std::string line;
    std::getline(in, line);
    if (line != "id,split") throw DataError(path.string() + ": expected header id,split");
    std::vector<Split> mask;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw DataError(path.string() + ": malformed line");
        const auto id = line.substr(0, comma);
        const auto name = line.substr(comma + 1);
        if (mask.size() >= ids.size() || ids[mask.size()] != id) throw DataError(path.string() + ": row ids differ from the cohort");
        Split s = Split::unlabeled;
        if (name == "train") s = Split::train;
        else if (name == "val") s = Split::val;
        else if (name == "test") s = Split::test;
        else if (name != "unlabeled") throw DataError(path.string() + ": unknown split '" + name + "'");
        mask.push_back(s);
    }
    if (mask.size() != ids.size()) throw DataError(path.string() + ": row count differs from the cohort");
    return mask;
}

void write_predictions(const fs::path& path, const std::vector<std::string>& ids, const std::vector<int>& pred) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    out << "id,prediction\n";
    for (std::size_t i = 0; i < ids.size(); ++i) out << ids[i] << ',' << pred[i] << '\n';
}

void write_matrix_csv(const fs::path& path, const Matrix& m) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    out << "class";
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << ',' << j;
    out << '\n' << std::setprecision(17);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        out << i;
        for (Eigen::Index j = 0; j < m.cols(); ++j) out << ',' << m(i, j);
        out << '\n';
    }
}

// Normalized attributes as used by the baselines, with the transform fitted on `c`.
struct BaselineInputs {
    NodeAttributes x;
    FeatureTable c_normalized;
    ColumnTransform c_transform;
    ColumnTransform z_transform;
};

BaselineInputs baseline_inputs(const Cohort& cohort) {
    BaselineInputs b;
    const auto c = normalize_columns(cohort.features);
    b.c_normalized = c.table;
    b.c_transform = c.transform;
    EmbeddingTable z = cohort.embeddings;
    if (z.cols() > 0) {
        b.z_transform = fit_column_transform(z.values);
        z.values = b.z_transform.apply(z.values);
    }
    b.x = concat_attributes(z, b.c_normalized);
    return b;
}

struct LoadedRun {
    Checkpoint ck;
    ModelKind kind = ModelKind::multiplex;
    TrainingConfig cfg;
};

LoadedRun load_run(const fs::path& dir, Manifest& m) {
    LoadedRun r;
    r.ck = read_checkpoint(dir / "model.ckpt");
    m.input(dir / "model.ckpt");
    r.kind = parse_model_kind(r.ck.kind);
    const auto run = read_json(dir / "run.json");
    m.input(dir / "run.json");
    r.cfg = TrainingConfig::from_json(run.at("config"));
    return r;
}

BaselineModel load_baseline(const LoadedRun& run, const BaselineInputs& in) {
    std::optional<SparseOperator> op;
    if (run.kind == ModelKind::single_gcn) {
        op = normalize_adjacency(build_relation_graph(in.c_normalized.values, run.ck.dims.at("theta").get<double>()));
    }
    return baseline_from_checkpoint(run.ck, std::move(op));
}

// --- subcommands ---

int cmd_synth(const Common& common, const std::string& synth_config, const std::string& cohort_kind) {
    Manifest m("synth", common);
    SynthConfig sc;
    if (!synth_config.empty()) {
        sc = SynthConfig::from_json(read_json(synth_config));
        m.input(synth_config);
    } else if (cohort_kind == "two_signal") {
        sc = SynthConfig::two_signal();
    } else if (cohort_kind == "one_signal") {
        sc = SynthConfig::one_signal();
    } else {
        throw UsageError("unknown cohort '" + cohort_kind + "' (expected two_signal or one_signal)");
    }
    if (common.seed) sc.seed = *common.seed;
    sc.validate();
    const auto s = generate_synthetic_cohort(sc);
    write_feature_csv(m.path("features.csv"), s.features);
    write_embedding_csv(m.path("embeddings.csv"), s.embeddings);
    write_labels_csv(m.path("labels.csv"), s.features.row_ids, s.labels.labels);
    auto types = s.ground_truth_json();
    types["source"] = "manual";
    write_json(m.path("types.json"), types);
    write_json(m.path("synth.json"), sc.to_json());
    for (const char* f : {"features.csv", "embeddings.csv", "labels.csv", "types.json", "synth.json"}) m.output(f);
    m.log(std::to_string(s.features.rows()) + " patients, " + std::to_string(s.features.cols()) + " columns");
    m.finish(sha256_hex(sc.to_json().dump()).substr(0, 16), sc.seed);
    return 0;
}

int cmd_cluster(const Common& common, const std::string& cohort_dir, const std::string& manual) {
    Manifest m("cluster", common);
    const auto cfg = resolve_config(common);
    const auto cohort = load_cohort(cohort_dir, m);
    nlohmann::json report;
    ClusterPartition p;
    if (!manual.empty()) {
        p = load_manual_split(manual, cohort.features);
        m.input(manual);
        report = {{"source", "manual"}};
    } else {
        const auto km = cluster_columns(normalize_columns(cohort.features).table, cfg);
        p = km.partition;
        report = {{"source", "kmeans"}, {"wcss", km.wcss}, {"best_restart", km.best_restart}, {"restarts", km.runs.size()}};
    }
    std::vector<std::size_t> sizes;
    for (int t = 0; t < p.num_types; ++t) sizes.push_back(p.columns_of(t).size());
    report["num_types"] = p.num_types;
    report["type_sizes"] = sizes;
    write_json(m.path("partition.json"), partition_to_json(p, cohort.features.column_names));
    write_json(m.path("cluster_report.json"), report);
    m.output("partition.json");
    m.output("cluster_report.json");
    m.log(std::to_string(p.num_types) + " relation types (" + partition_source_name(p.source) + ")");
    m.finish(cfg.hash(), cfg.seed);
    return 0;
}

int cmd_graph(const Common& common, const std::string& cohort_dir, const std::string& partition) {
    Manifest m("graph", common);
    const auto cfg = resolve_config(common);
    const auto cohort = load_cohort(cohort_dir, m);
    const auto p = load_partition(partition, cohort.features, m);
    const auto g = prepare_graph(cohort, cfg, p);
    for (const auto& f : write_multiplex_dir(common.out, g)) m.output(f);
    std::ostringstream edges;
    for (const auto& r : g.relations) edges << ' ' << r.edges.size();
    m.log("edges per relation:" + edges.str());
    m.finish(cfg.hash(), cfg.seed);
    return 0;
}

int cmd_train(const Common& common, const std::string& cohort_dir, const std::string& graph_dir,
              const std::string& model) {
    Manifest m("train", common);
    const auto cfg = resolve_config(common);
    const auto kind = parse_model_kind(model);
    const auto cohort = load_cohort(cohort_dir, m);
    const auto labels = make_labels(cohort.labels, cohort.num_classes, cfg);
    std::vector<int> pred;
    nlohmann::json report;
    Checkpoint ck;
    if (kind == ModelKind::multiplex) {
        if (graph_dir.empty()) throw UsageError("train: --graph is required for the multiplex model");
        const auto g = read_multiplex_dir(graph_dir, cohort.features, cohort.embeddings);
        m.input(fs::path(graph_dir) / "multiplex.json");
        const auto res = fit(g, labels, cfg);
        pred = predict(res.state.params);
        report = res.report.to_json();
        ck = checkpoint_from_state(res.state, cfg.hash());
        m.log("best epoch " + std::to_string(res.report.best_epoch) + ", val micro-F1 " +
              std::to_string(res.report.best_val_micro_f1));
    } else {
        const auto in = baseline_inputs(cohort);
        const auto res = kind == ModelKind::mlp ? fit_mlp(in.x, labels, cfg)
                                                : fit_single_gcn(in.x, in.c_normalized, labels, cfg.baseline_theta(), cfg);
        pred = res.model.predict(in.x.x);
        report = res.report.to_json();
        ck = checkpoint_from_baseline(res.model, cfg.hash());
        m.log("best epoch " + std::to_string(res.report.best_epoch) + ", val micro-F1 " +
              std::to_string(res.report.best_val_micro_f1));
    }
    write_checkpoint(m.path("model.ckpt"), ck);
    write_json(m.path("train_report.json"), report);
    write_splits(m.path("splits.csv"), cohort.features.row_ids, labels.mask);
    write_predictions(m.path("predictions.csv"), cohort.features.row_ids, pred);
    write_json(m.path("run.json"), {{"model", model_kind_name(kind)}, {"config", cfg.to_json()}, {"config_hash", cfg.hash()}});
    for (const char* f : {"model.ckpt", "train_report.json", "splits.csv", "predictions.csv", "run.json"}) m.output(f);
    m.finish(cfg.hash(), cfg.seed);
    return 0;
}

int cmd_eval(const Common& common, const std::string& cohort_dir, const std::string& run_dir, const std::string& split) {
    Manifest m("eval", common);
    const auto cohort = load_cohort(cohort_dir, m);
    const auto run = load_run(run_dir, m);
    LabelVector labels;
    labels.labels = cohort.labels;
    labels.num_classes = cohort.num_classes;
    labels.mask = read_splits(fs::path(run_dir) / "splits.csv", cohort.features.row_ids);
    m.input(fs::path(run_dir) / "splits.csv");
    labels.validate();
    Split which = Split::test;
    if (split == "train") which = Split::train;
    else if (split == "val") which = Split::val;
    else if (split != "test") throw UsageError("eval: --split must be train, val or test");

    std::vector<int> pred;
    std::vector<double> attention;
    if (run.kind == ModelKind::multiplex) {
        const auto state = state_from_checkpoint(run.ck);
        if (state.dims.nodes != cohort.features.rows()) throw DataError("eval: checkpoint and cohort sizes differ");
        pred = predict(state.params);
        const Vector w = softmax(state.params.attention_logits);
        attention.assign(w.data(), w.data() + w.size());
    } else {
        const auto in = baseline_inputs(cohort);
        pred = load_baseline(run, in).predict(in.x.x);
    }
    auto report = evaluate_split(pred, labels, which);
    report.kind = model_kind_name(run.kind);
    report.seed = run.ck.seed;
    report.config_hash = run.ck.config_hash;
    report.attention = attention;
    write_json(m.path("metrics.json"), report.to_json());
    m.output("metrics.json");
    m.log(split + " micro-F1 " + std::to_string(report.micro_f1) + ", macro-F1 " + std::to_string(report.macro_f1));
    m.finish(run.ck.config_hash, run.ck.seed);
    return 0;
}

int cmd_explain(const Common& common, const std::string& cohort_dir, const std::string& graph_dir,
                const std::string& run_dir) {
    Manifest m("explain", common);
    const auto cohort = load_cohort(cohort_dir, m);
    const auto run = load_run(run_dir, m);
    if (run.kind != ModelKind::multiplex) throw UsageError("explain: attention exists only for the multiplex model");
    const auto g = read_multiplex_dir(graph_dir, cohort.features, cohort.embeddings);
    m.input(fs::path(graph_dir) / "multiplex.json");
    const auto state = state_from_checkpoint(run.ck);
    if (state.dims.relations != g.relations.size()) throw DataError("explain: checkpoint and graph relation counts differ");
    const auto att = attention_report(state.params, g.partition, g.column_names);
    write_json(m.path("attention.json"), att.to_json());
    m.output("attention.json");
    const Matrix c = g.attributes.tabular_block();
    write_matrix_csv(m.path("class_similarity_all.csv"), pairwise_class_similarity(c, cohort.labels, cohort.num_classes));
    m.output("class_similarity_all.csv");
    for (int t = 0; t < g.partition.num_types; ++t) {
        const auto name = "class_similarity_type_" + std::to_string(t) + ".csv";
        write_matrix_csv(m.path(name), pairwise_class_similarity(c, cohort.labels, cohort.num_classes, g.partition.columns_of(t)));
        m.output(name);
    }
    std::ostringstream w;
    for (double v : att.weights) w << ' ' << v;
    m.log("attention:" + w.str());
    m.finish(run.ck.config_hash, run.ck.seed);
    return 0;
}

int cmd_infer(const Common& common, const std::string& cohort_dir, const std::string& graph_dir,
              const std::string& run_dir, const std::string& new_rows, const std::string& new_embeddings) {
    Manifest m("infer", common);
    const auto cohort = load_cohort(cohort_dir, m);
    const auto run = load_run(run_dir, m);
    const auto fresh = load_feature_csv(new_rows);
    m.input(new_rows);
    if (fresh.column_names != cohort.features.column_names) throw DataError("infer: new rows must have the cohort's columns");
    EmbeddingTable z_new;
    if (!new_embeddings.empty()) {
        z_new = load_embedding_csv(new_embeddings);
        m.input(new_embeddings);
    } else {
        z_new.row_ids = fresh.row_ids;
        z_new.values.resize(static_cast<Eigen::Index>(fresh.rows()), 0);
    }
    if ((z_new.cols() > 0) != (cohort.embeddings.cols() > 0)) {
        throw DataError("infer: new rows need embeddings exactly when the cohort has them");
    }

    std::vector<int> pred;
    if (run.kind == ModelKind::multiplex) {
        if (graph_dir.empty()) throw UsageError("infer: --graph is required for the multiplex model");
        const auto g = read_multiplex_dir(graph_dir, cohort.features, cohort.embeddings);
        m.input(fs::path(graph_dir) / "multiplex.json");
        const auto extended = attach_new_nodes(g, fresh, z_new);
        pred = predict_inductive(extended, g.num_nodes(), state_from_checkpoint(run.ck).params);
    } else {
        // Baselines see the new rows through the training-time transforms; the single-graph
        // model rebuilds its graph over old and new rows together.
        auto in = baseline_inputs(cohort);
        FeatureTable c_all = in.c_normalized;
        const Matrix c_new = in.c_transform.apply(fresh.values);
        c_all.values.conservativeResize(c_all.values.rows() + c_new.rows(), Eigen::NoChange);
        c_all.values.bottomRows(c_new.rows()) = c_new;
        Matrix x_all(in.x.x.rows() + c_new.rows(), in.x.x.cols());
        x_all.topRows(in.x.x.rows()) = in.x.x;
        Matrix x_new(c_new.rows(), in.x.x.cols());
        if (z_new.cols() > 0) x_new.leftCols(z_new.values.cols()) = in.z_transform.apply(z_new.values);
        x_new.rightCols(c_new.cols()) = c_new;
        x_all.bottomRows(c_new.rows()) = x_new;
        auto model = load_baseline(run, in);
        if (run.kind == ModelKind::single_gcn) model.op = normalize_adjacency(build_relation_graph(c_all.values, model.theta));
        const auto all = model.predict(x_all);
        pred.assign(all.end() - static_cast<std::ptrdiff_t>(fresh.rows()), all.end());
    }
    write_predictions(m.path("predictions.csv"), fresh.row_ids, pred);
    m.output("predictions.csv");
    m.log(std::to_string(pred.size()) + " new rows classified");
    m.finish(run.ck.config_hash, run.ck.seed);
    return 0;
}

int cmd_sweep(const Common& common, const std::string& cohort_dir, const std::string& kind, const std::string& grid,
              int replicates, const std::string& model, const std::string& partition) {
    Manifest m("sweep", common);
    const auto cfg = resolve_config(common);
    const auto cohort = load_cohort(cohort_dir, m);
    SweepOptions opt;
    opt.kind = parse_sweep_kind(kind);
    opt.replicates = replicates;
    opt.model = parse_model_kind(model);
    std::stringstream ss(grid);
    for (std::string item; std::getline(ss, item, ',');) {
        if (!item.empty()) opt.grid.push_back(item);
    }
    if (!partition.empty()) opt.partition = load_partition(partition, cohort.features, m);
    m.log(std::to_string(opt.grid.size() * static_cast<std::size_t>(replicates)) + " runs");
    const auto res = run_sweep(cohort, cfg, opt);
    write_sweep_csv(m.path("sweep.csv"), res);
    write_json(m.path("sweep_summary.json"), res.summary_json());
    m.output("sweep.csv");
    m.output("sweep_summary.json");
    m.finish(cfg.hash(), cfg.seed);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multiplex patient-graph classification pipeline"};
    app.require_subcommand(1);

    Common common;
    std::string cohort, graph, run, partition, manual, model = "multiplex", split = "test";
    std::string synth_config, cohort_kind = "two_signal", new_rows, new_embeddings, sweep_kind, grid;
    int replicates = 5;

    auto* synth = app.add_subcommand("synth", "Generate a synthetic cohort");
    add_common(synth, common);
    synth->add_option("--synth-config", synth_config, "Generator JSON");
    synth->add_option("--cohort", cohort_kind, "Built-in cohort: two_signal or one_signal")->capture_default_str();

    auto* cluster = app.add_subcommand("cluster", "Partition tabular columns into relation types");
    add_common(cluster, common);
    cluster->add_option("--cohort", cohort, "Cohort directory")->required();
    cluster->add_option("--manual", manual, "Domain-knowledge split JSON {column: type}");

    auto* graph_cmd = app.add_subcommand("graph", "Build one similarity graph per relation type");
    add_common(graph_cmd, common);
    graph_cmd->add_option("--cohort", cohort, "Cohort directory")->required();
    graph_cmd->add_option("--partition", partition, "partition.json from cluster")->required();

    auto* train = app.add_subcommand("train", "Train a model");
    add_common(train, common);
    train->add_option("--cohort", cohort, "Cohort directory")->required();
    train->add_option("--graph", graph, "Graph directory (multiplex model)");
    train->add_option("--model", model, "multiplex, mlp or single_gcn")->capture_default_str();

    auto* eval = app.add_subcommand("eval", "Score a trained model on one split");
    add_common(eval, common);
    eval->add_option("--cohort", cohort, "Cohort directory")->required();
    eval->add_option("--run", run, "Training output directory")->required();
    eval->add_option("--split", split, "train, val or test")->capture_default_str();

    auto* explain = app.add_subcommand("explain", "Attention weights and class-similarity matrices");
    add_common(explain, common);
    explain->add_option("--cohort", cohort, "Cohort directory")->required();
    explain->add_option("--graph", graph, "Graph directory")->required();
    explain->add_option("--run", run, "Training output directory")->required();

    auto* infer = app.add_subcommand("infer", "Attach new patients and classify them");
    add_common(infer, common);
    infer->add_option("--cohort", cohort, "Cohort directory")->required();
    infer->add_option("--graph", graph, "Graph directory (multiplex model)");
    infer->add_option("--run", run, "Training output directory")->required();
    infer->add_option("--new", new_rows, "Feature CSV of the new patients")->required();
    infer->add_option("--new-embeddings", new_embeddings, "Embedding CSV of the new patients");

    auto* sweep = app.add_subcommand("sweep", "Seeded grid of runs with median and IQR");
    add_common(sweep, common);
    sweep->add_option("--cohort", cohort, "Cohort directory")->required();
    sweep->add_option("--kind", sweep_kind, "cluster_count, label_fraction or feature_subset")->required();
    sweep->add_option("--grid", grid, "Comma-separated grid values")->required();
    sweep->add_option("--replicates", replicates, "Seeds per grid value")->capture_default_str();
    sweep->add_option("--model", model, "multiplex, mlp or single_gcn")->capture_default_str();
    sweep->add_option("--partition", partition, "Partition JSON for feature_subset or label_fraction");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (*synth) return cmd_synth(common, synth_config, cohort_kind);
        if (*cluster) return cmd_cluster(common, cohort, manual);
        if (*graph_cmd) return cmd_graph(common, cohort, partition);
        if (*train) return cmd_train(common, cohort, graph, model);
        if (*eval) return cmd_eval(common, cohort, run, split);
        if (*explain) return cmd_explain(common, cohort, graph, run);
        if (*infer) return cmd_infer(common, cohort, graph, run, new_rows, new_embeddings);
        if (*sweep) return cmd_sweep(common, cohort, sweep_kind, grid, replicates, model, partition);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 1;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return 3;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
