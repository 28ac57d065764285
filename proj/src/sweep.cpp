#include "medplex/sweep.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>

namespace medplex {

SweepKind parse_sweep_kind(const std::string& name) {
    if (name == "cluster_count") return SweepKind::cluster_count;
    if (name == "label_fraction") return SweepKind::label_fraction;
    if (name == "feature_subset") return SweepKind::feature_subset;
    throw UsageError("unknown sweep kind '" + name + "' (expected cluster_count, label_fraction or feature_subset)");
}

const char* sweep_kind_name(SweepKind k) {
    switch (k) {
    case SweepKind::cluster_count:
        return "cluster_count";
    case SweepKind::label_fraction:
        return "label_fraction";
    case SweepKind::feature_subset:
        return "feature_subset";
    }
    return "?";
}

namespace {

double quantile(std::vector<double> v, double q) {
    if (v.empty()) throw DataError("quantile of an empty sample");
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

template <typename T>
T parse_number(const std::string& s, const char* what) {
    T v{};
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) throw UsageError(std::string("bad ") + what + " '" + s + "'");
    return v;
}

std::vector<int> parse_types(const std::string& s) {
    std::vector<int> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const auto end = std::min(s.find('+', start), s.size());
        out.push_back(parse_number<int>(s.substr(start, end - start), "type list"));
        start = end + 1;
    }
    return out;
}

} // namespace

double median(std::vector<double> v) {
    return quantile(std::move(v), 0.5);
}

double iqr(std::vector<double> v) {
    return quantile(v, 0.75) - quantile(v, 0.25);
}

SweepResult run_sweep(const Cohort& cohort, const TrainingConfig& base, const SweepOptions& opt) {
    if (opt.grid.empty()) throw UsageError("sweep: grid is empty");
    if (opt.replicates < 1) throw UsageError("sweep: replicates must be >= 1");
    base.validate();

    std::optional<ClusterPartition> partition = opt.partition;
    if (opt.kind == SweepKind::feature_subset && !partition) {
        partition = cluster_columns(normalize_columns(cohort.features).table, base).partition;
    }

    // Validate the grid up front so a bad value fails before any training.
    struct Job {
        TrainingConfig cfg;
        std::optional<Cohort> cohort;
        std::optional<ClusterPartition> partition;
        std::string grid_value;
    };
    std::vector<Job> jobs;
    const double min_theta = *std::min_element(base.thetas.begin(), base.thetas.end());
    for (const auto& value : opt.grid) {
        for (int r = 0; r < opt.replicates; ++r) {
            Job job{base, std::nullopt, std::nullopt, value};
            job.cfg.seed = base.seed + static_cast<std::uint64_t>(r);
            switch (opt.kind) {
            case SweepKind::cluster_count: {
                const int k = parse_number<int>(value, "cluster count");
                if (k < 1) throw UsageError("sweep: cluster count must be >= 1");
                job.cfg.clusters = k;
                job.cfg.thetas.assign(static_cast<std::size_t>(k), min_theta);
                break;
            }
            case SweepKind::label_fraction: {
                const double f = parse_number<double>(value, "label fraction");
                if (!(f > 0.0 && f <= 1.0)) throw UsageError("sweep: label fraction must lie in (0, 1]");
                job.cfg.label_fraction = f;
                job.partition = opt.partition;
                break;
            }
            case SweepKind::feature_subset: {
                const auto types = parse_types(value);
                ClusterPartition kept;
                job.cohort = select_types(cohort, *partition, types, &kept);
                job.partition = kept;
                job.cfg.clusters = kept.num_types;
                job.cfg.thetas.clear();
                for (int t : types) job.cfg.thetas.push_back(base.thetas.at(static_cast<std::size_t>(t)));
                break;
            }
            }
            job.cfg.validate();
            jobs.push_back(std::move(job));
        }
    }

    SweepResult out;
    out.kind = opt.kind;
    out.rows.resize(jobs.size());
    std::vector<std::exception_ptr> errors(jobs.size());
#pragma omp parallel for schedule(dynamic)
    for (std::size_t j = 0; j < jobs.size(); ++j) {
        try {
            const auto& job = jobs[j];
            const auto res = run_experiment(job.cohort ? *job.cohort : cohort, job.cfg, opt.model, job.partition);
            out.rows[j] = {job.grid_value, job.cfg.seed, res.test.macro_f1, res.test.micro_f1};
        } catch (...) {
            errors[j] = std::current_exception();
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    const auto reps = static_cast<std::size_t>(opt.replicates);
    for (std::size_t gi = 0; gi < opt.grid.size(); ++gi) {
        std::vector<double> micro;
        std::vector<double> macro;
        for (std::size_t r = 0; r < reps; ++r) {
            micro.push_back(out.rows[gi * reps + r].micro_f1);
            macro.push_back(out.rows[gi * reps + r].macro_f1);
        }
        out.summary.push_back({opt.grid[gi], median(micro), iqr(micro), median(macro), iqr(macro)});
    }
    return out;
}

nlohmann::json SweepResult::summary_json() const {
    nlohmann::json rows_json = nlohmann::json::array();
    for (const auto& s : summary) {
        rows_json.push_back({{"grid_value", s.grid_value},
                             {"median_micro_f1", s.median_micro_f1},
                             {"iqr_micro_f1", s.iqr_micro_f1},
                             {"median_macro_f1", s.median_macro_f1},
                             {"iqr_macro_f1", s.iqr_macro_f1}});
    }
    return {{"kind", sweep_kind_name(kind)}, {"summary", rows_json}};
}

void write_sweep_csv(const std::filesystem::path& path, const SweepResult& r) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    out << "grid_value,seed,macro_f1,micro_f1\n" << std::setprecision(17);
    for (const auto& row : r.rows) {
        out << row.grid_value << ',' << row.seed << ',' << row.macro_f1 << ',' << row.micro_f1 << '\n';
    }
}

} // namespace medplex
