#include "medplex/data.hpp"

#include "cli_support.hpp"
#include "test_support.hpp"

#include <doctest.h>
#include <json.hpp>

namespace fs = std::filesystem;
using cli::quote;

namespace {

// A small cohort and a short training config keep the chain fast.
fs::path small_setup(const std::string& name) {
    const auto root = testing::temp_dir(name);
    testing::write_text(root / "synth.json", R"({"n": 90, "seed": 3, "embedding_dim": 4,
        "types": [{"columns": 6, "separation": 1.0, "class_groups": [0, 1, 1]},
                  {"columns": 6, "separation": 1.0, "class_groups": [1, 0, 1]},
                  {"columns": 6, "separation": 0.0}]})");
    testing::write_text(root / "train.json", R"({"preset": "synth", "clusters": 3, "thetas": [0.3, 0.3, 0.3],
        "epochs": 30, "baseline_epochs": 30, "embedding_dim": 8})");
    return root;
}

std::string slurp(const fs::path& p) {
    return testing::read_text(p);
}

} // namespace

TEST_CASE("synth, cluster, graph, train, eval, explain chain") {
    const auto r = small_setup("cli_chain");
    const auto cfg = "--config " + quote(r / "train.json");
    REQUIRE(cli::run("synth --synth-config " + quote(r / "synth.json") + " --out " + quote(r / "cohort")) == 0);
    for (const char* f : {"features.csv", "embeddings.csv", "labels.csv", "types.json", "manifest.json"}) {
        CHECK(fs::exists(r / "cohort" / f));
    }
    REQUIRE(cli::run("cluster " + cfg + " --cohort " + quote(r / "cohort") + " --out " + quote(r / "cl")) == 0);
    CHECK(fs::exists(r / "cl" / "partition.json"));
    REQUIRE(cli::run("cluster " + cfg + " --cohort " + quote(r / "cohort") + " --manual " +
                     quote(r / "cohort" / "types.json") + " --out " + quote(r / "manual")) == 0);
    const auto part = nlohmann::json::parse(slurp(r / "manual" / "partition.json"));
    CHECK(part.at("source") == "manual");

    REQUIRE(cli::run("graph " + cfg + " --cohort " + quote(r / "cohort") + " --partition " +
                     quote(r / "manual" / "partition.json") + " --out " + quote(r / "graph")) == 0);
    CHECK(fs::exists(r / "graph" / "multiplex.json"));
    CHECK(fs::exists(r / "graph" / "relation_2.edges"));

    REQUIRE(cli::run("train " + cfg + " --cohort " + quote(r / "cohort") + " --graph " + quote(r / "graph") +
                     " --out " + quote(r / "run")) == 0);
    for (const char* f : {"model.ckpt", "train_report.json", "splits.csv", "predictions.csv", "run.json"}) {
        CHECK(fs::exists(r / "run" / f));
    }
    REQUIRE(cli::run("eval --cohort " + quote(r / "cohort") + " --run " + quote(r / "run") + " --out " +
                     quote(r / "eval")) == 0);
    const auto m = nlohmann::json::parse(slurp(r / "eval" / "metrics.json"));
    CHECK(m.at("micro_f1").get<double>() >= 0.0);
    CHECK(m.at("micro_f1").get<double>() <= 1.0);
    CHECK(m.at("attention").size() == 3);

    REQUIRE(cli::run("explain --cohort " + quote(r / "cohort") + " --graph " + quote(r / "graph") + " --run " +
                     quote(r / "run") + " --out " + quote(r / "explain")) == 0);
    const auto att = nlohmann::json::parse(slurp(r / "explain" / "attention.json"));
    double sum = 0.0;
    for (const auto& rel : att.at("relations")) sum += rel.at("weight").get<double>();
    CHECK(std::abs(sum - 1.0) <= 1e-9);
    CHECK(fs::exists(r / "explain" / "class_similarity_all.csv"));

    for (const char* model : {"mlp", "single_gcn"}) {
        const auto out = r / (std::string("run_") + model);
        REQUIRE(cli::run("train " + cfg + " --model " + model + " --cohort " + quote(r / "cohort") + " --out " +
                         quote(out)) == 0);
        REQUIRE(cli::run("eval --cohort " + quote(r / "cohort") + " --run " + quote(out) + " --out " +
                         quote(out / "eval")) == 0);
        const auto mm = nlohmann::json::parse(slurp(out / "eval" / "metrics.json"));
        CHECK(mm.at("mask_hash") == m.at("mask_hash"));
    }
}

TEST_CASE("training twice with the same seed writes identical reports") {
    const auto r = small_setup("cli_determinism");
    const auto cfg = "--config " + quote(r / "train.json");
    REQUIRE(cli::run("synth --synth-config " + quote(r / "synth.json") + " --out " + quote(r / "cohort")) == 0);
    REQUIRE(cli::run("cluster " + cfg + " --cohort " + quote(r / "cohort") + " --out " + quote(r / "cl")) == 0);
    REQUIRE(cli::run("graph " + cfg + " --cohort " + quote(r / "cohort") + " --partition " +
                     quote(r / "cl" / "partition.json") + " --out " + quote(r / "graph")) == 0);
    for (const char* run : {"a", "b"}) {
        REQUIRE(cli::run("train " + cfg + " --seed 7 --cohort " + quote(r / "cohort") + " --graph " +
                         quote(r / "graph") + " --out " + quote(r / run)) == 0);
        REQUIRE(cli::run("eval --cohort " + quote(r / "cohort") + " --run " + quote(r / run) + " --out " +
                         quote(r / run / "eval")) == 0);
    }
    for (const char* f : {"train_report.json", "run.json", "model.ckpt", "predictions.csv", "eval/metrics.json"}) {
        INFO(f);
        CHECK(slurp(r / "a" / f) == slurp(r / "b" / f));
    }
    const auto report = nlohmann::json::parse(slurp(r / "a" / "run.json"));
    CHECK(report.at("config").at("seed") == 7);
}

TEST_CASE("infer on a duplicated training row repeats its prediction") {
    const auto r = small_setup("cli_infer");
    const auto cfg = "--config " + quote(r / "train.json");
    REQUIRE(cli::run("synth --synth-config " + quote(r / "synth.json") + " --out " + quote(r / "cohort")) == 0);
    REQUIRE(cli::run("cluster " + cfg + " --cohort " + quote(r / "cohort") + " --manual " +
                     quote(r / "cohort" / "types.json") + " --out " + quote(r / "cl")) == 0);
    REQUIRE(cli::run("graph " + cfg + " --cohort " + quote(r / "cohort") + " --partition " +
                     quote(r / "cl" / "partition.json") + " --out " + quote(r / "graph")) == 0);
    REQUIRE(cli::run("train " + cfg + " --cohort " + quote(r / "cohort") + " --graph " + quote(r / "graph") +
                     " --out " + quote(r / "run")) == 0);

    const auto c = medplex::load_feature_csv(r / "cohort" / "features.csv");
    const auto z = medplex::load_embedding_csv(r / "cohort" / "embeddings.csv");
    medplex::FeatureTable cn = c;
    cn.values = c.values.topRows(1);
    cn.row_ids = {"copy0"};
    medplex::EmbeddingTable zn = z;
    zn.values = z.values.topRows(1);
    zn.row_ids = {"copy0"};
    medplex::write_feature_csv(r / "new.csv", cn);
    medplex::write_embedding_csv(r / "new_z.csv", zn);
    REQUIRE(cli::run("infer --cohort " + quote(r / "cohort") + " --graph " + quote(r / "graph") + " --run " +
                     quote(r / "run") + " --new " + quote(r / "new.csv") + " --new-embeddings " +
                     quote(r / "new_z.csv") + " --out " + quote(r / "infer")) == 0);

    auto prediction_of = [](const std::string& text, const std::string& id) {
        const auto pos = text.find("\n" + id + ",");
        REQUIRE(pos != std::string::npos);
        const auto start = pos + id.size() + 2;
        return text.substr(start, text.find('\n', start) - start);
    };
    CHECK(prediction_of(slurp(r / "infer" / "predictions.csv"), "copy0") ==
          prediction_of(slurp(r / "run" / "predictions.csv"), c.row_ids[0]));
}

TEST_CASE("exit codes distinguish usage and data errors") {
    const auto r = testing::temp_dir("cli_errors");
    CHECK(cli::run("train --no-such-flag --out " + quote(r / "x")) == 1);
    CHECK(cli::run("bogus") == 1);
    CHECK(cli::run("cluster --cohort " + quote(r / "missing") + " --out " + quote(r / "y")) == 2);
    CHECK(cli::run("cluster --preset nope --cohort " + quote(r / "missing") + " --out " + quote(r / "z")) == 1);
    CHECK(cli::run("--help") == 0);
}
