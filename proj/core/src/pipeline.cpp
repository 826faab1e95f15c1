#include "selfboost/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>

#include "selfboost/baselines.hpp"
#include "selfboost/checkpoint.hpp"
#include "selfboost/csv.hpp"
#include "selfboost/error.hpp"
#include "selfboost/rng.hpp"

namespace selfboost {

namespace fs = std::filesystem;

void to_json(json& j, const SelectionConfig& c) {
    j = json{{"num_clusters", c.num_clusters},
             {"drop_least_related", c.drop_least_related},
             {"fold_negative_correlation", c.fold_negative_correlation}};
}

void from_json(const json& j, SelectionConfig& c) {
    reject_unknown_keys(j, {"num_clusters", "drop_least_related", "fold_negative_correlation"},
                        "selection");
    if (j.contains("num_clusters")) j.at("num_clusters").get_to(c.num_clusters);
    if (j.contains("drop_least_related")) j.at("drop_least_related").get_to(c.drop_least_related);
    if (j.contains("fold_negative_correlation"))
        j.at("fold_negative_correlation").get_to(c.fold_negative_correlation);
}

void ExperimentConfig::validate() const {
    if (input_csv.empty()) throw Error(ErrorCode::ConfigInvalid, "input_csv is required");
    if (output_dir.empty()) throw Error(ErrorCode::ConfigInvalid, "output_dir is required");
    if (lags.empty()) throw Error(ErrorCode::ConfigInvalid, "lags must be non-empty");
    for (int lag : lags) {
        if (lag < 1) throw Error(ErrorCode::ConfigInvalid, "lags must be positive");
    }
    if (horizon < 1) throw Error(ErrorCode::ConfigInvalid, "horizon must be >= 1");
    if (ar_order < 0) throw Error(ErrorCode::ConfigInvalid, "ar_order must be >= 0");
    decomposition.validate();
    training.validate();
    split.validate();
    if (selection.num_clusters < 2)
        throw Error(ErrorCode::ConfigInvalid, "selection.num_clusters must be >= 2");
}

void to_json(json& j, const ExperimentConfig& c) {
    j = json{{"input_csv", c.input_csv},
             {"output_dir", c.output_dir},
             {"seed", c.seed},
             {"lags", c.lags},
             {"horizon", c.horizon},
             {"interpolate_missing", c.interpolate_missing},
             {"ar_order", c.ar_order},
             {"decomposition", c.decomposition},
             {"selection", c.selection},
             {"architecture", c.architecture},
             {"training", c.training},
             {"split",
              {{"train_fraction", c.split.train_fraction},
               {"validation_fraction", c.split.validation_fraction},
               {"test_fraction", c.split.test_fraction}}}};
}

void from_json(const json& j, ExperimentConfig& c) {
    reject_unknown_keys(j,
                        {"input_csv", "output_dir", "seed", "lags", "horizon",
                         "interpolate_missing", "ar_order", "decomposition", "selection",
                         "architecture", "training", "split"},
                        "experiment");
    if (j.contains("input_csv")) j.at("input_csv").get_to(c.input_csv);
    if (j.contains("output_dir")) j.at("output_dir").get_to(c.output_dir);
    if (j.contains("seed")) j.at("seed").get_to(c.seed);
    if (j.contains("lags")) j.at("lags").get_to(c.lags);
    if (j.contains("horizon")) j.at("horizon").get_to(c.horizon);
    if (j.contains("interpolate_missing")) j.at("interpolate_missing").get_to(c.interpolate_missing);
    if (j.contains("ar_order")) j.at("ar_order").get_to(c.ar_order);
    if (j.contains("decomposition")) j.at("decomposition").get_to(c.decomposition);
    if (j.contains("selection")) j.at("selection").get_to(c.selection);
    if (j.contains("architecture")) j.at("architecture").get_to(c.architecture);
    if (j.contains("training")) j.at("training").get_to(c.training);
    if (j.contains("split")) {
        const json& s = j.at("split");
        reject_unknown_keys(s, {"train_fraction", "validation_fraction", "test_fraction"}, "split");
        if (s.contains("train_fraction")) s.at("train_fraction").get_to(c.split.train_fraction);
        if (s.contains("validation_fraction"))
            s.at("validation_fraction").get_to(c.split.validation_fraction);
        if (s.contains("test_fraction")) s.at("test_fraction").get_to(c.split.test_fraction);
    }
}

ExperimentConfig experiment_config_from_file(const std::string& path) {
    ExperimentConfig config = load_json_file(path).get<ExperimentConfig>();
    config.validate();
    return config;
}

ArchitectureConfig resolve_architecture(ArchitectureConfig base, int lag, int horizon) {
    base.lag = lag;
    base.horizon = horizon;
    int remaining = lag;
    for (auto& [filters, width] : base.conv_layers) {
        width = std::min(width, remaining);
        remaining = remaining - width + 1;
    }
    base.pool_width = std::max(1, std::min(base.pool_width, remaining));
    base.validate();
    base.trunk_sequence_length();  // must be feasible now
    return base;
}

void write_decomposition_csv(const std::string& path, const ImfSet& set) {
    std::vector<std::string> header;
    for (std::size_t i = 0; i < set.imfs.size(); ++i) header.push_back("imf_" + std::to_string(i + 1));
    header.push_back("residual");
    std::vector<std::vector<double>> rows(static_cast<std::size_t>(set.source_length));
    for (int t = 0; t < set.source_length; ++t) {
        auto& row = rows[static_cast<std::size_t>(t)];
        row.reserve(header.size());
        for (const auto& imf : set.imfs) row.push_back(imf[t]);
        row.push_back(set.residual[t]);
    }
    write_csv(path, header, rows);
}

ImfSet read_decomposition_csv(const std::string& path) {
    const CsvTable table = read_csv(path);
    const int residual_col = table.column("residual");
    if (residual_col < 0) {
        throw Error(ErrorCode::IoError, "'" + path + "' has no 'residual' column");
    }
    const int n = static_cast<int>(table.rows.size());
    if (n == 0) {
        throw Error(ErrorCode::IoError, "'" + path + "' has no data rows");
    }
    std::vector<TimeSeries> imfs;
    std::vector<double> column(static_cast<std::size_t>(n));
    for (std::size_t c = 0; c < table.header.size(); ++c) {
        if (table.header[c] == "residual") continue;
        if (table.header[c].rfind("imf_", 0) != 0) {
            throw Error(ErrorCode::IoError,
                        "'" + path + "': unexpected column '" + table.header[c] + "'");
        }
        for (int t = 0; t < n; ++t) column[static_cast<std::size_t>(t)] = table.rows[static_cast<std::size_t>(t)][c];
        imfs.emplace_back(table.header[c], column);
    }
    for (int t = 0; t < n; ++t) {
        column[static_cast<std::size_t>(t)] =
            table.rows[static_cast<std::size_t>(t)][static_cast<std::size_t>(residual_col)];
    }
    return ImfSet{std::move(imfs), TimeSeries("residual", column), n, {}};
}

json decomposition_sidecar(const ImfSet& set, const DecompositionConfig& config) {
    json components = json::array();
    for (std::size_t i = 0; i < set.imfs.size(); ++i) {
        const auto& imf = set.imfs[i];
        const auto [maxima, minima] = find_extrema(imf);
        components.push_back(
            json{{"name", imf.name()},
                 {"zero_crossings", count_zero_crossings(imf.values())},
                 {"extrema", static_cast<int>(maxima.size() + minima.size())},
                 {"sift_count", i < set.sift_counts.size() ? set.sift_counts[i] : 0.0}});
    }
    return json{{"config", config},
                {"seed", config.rng_seed},
                {"source_length", set.source_length},
                {"num_imfs", static_cast<int>(set.imfs.size())},
                {"imfs", components}};
}

json grouping_document(const SimilarityReport& report, const FeatureGrouping& grouping) {
    return json{{"correlations", report.correlations},
                {"distances", report.distances},
                {"task_indices", grouping.task_indices},
                {"view_indices", grouping.view_indices},
                {"dropped_indices", grouping.dropped_indices},
                {"num_clusters", grouping.num_clusters}};
}

void read_grouping_document(const json& j, SimilarityReport& report, FeatureGrouping& grouping) {
    j.at("correlations").get_to(report.correlations);
    j.at("distances").get_to(report.distances);
    j.at("task_indices").get_to(grouping.task_indices);
    j.at("view_indices").get_to(grouping.view_indices);
    if (j.contains("dropped_indices")) j.at("dropped_indices").get_to(grouping.dropped_indices);
    if (j.contains("num_clusters")) j.at("num_clusters").get_to(grouping.num_clusters);
}

void write_predictions_csv(const std::string& path, const Tensor& actual, const Tensor& predicted,
                           int first_window_global, int lag) {
    if (!actual.same_shape(predicted) || actual.rank() != 2) {
        throw Error(ErrorCode::ShapeMismatch, "write_predictions_csv: shape mismatch");
    }
    std::vector<std::vector<double>> rows;
    rows.reserve(static_cast<std::size_t>(actual.size()));
    for (int s = 0; s < actual.dim(0); ++s) {
        for (int h = 0; h < actual.dim(1); ++h) {
            rows.push_back({static_cast<double>(first_window_global + s + lag + h), actual.at(s, h),
                            predicted.at(s, h)});
        }
    }
    write_csv(path, {"index", "actual", "predicted"}, rows);
}

json metrics_to_json(const MetricReport& report) {
    json j{{"rmse", report.rmse},
           {"mae", report.mae},
           {"mape_excluded", report.mape_excluded},
           {"r2", report.r2},
           {"n", report.n}};
    if (report.mape.has_value()) {
        j["mape"] = *report.mape;
    } else {
        j["mape"] = nullptr;
    }
    return j;
}

void write_training_log_csv(const std::string& path, const TrainingLog& log,
                            const std::vector<std::string>& task_names) {
    std::vector<std::string> header{"epoch"};
    for (const auto& name : task_names) header.push_back("train_" + name);
    for (const auto& name : task_names) header.push_back("val_" + name);
    std::vector<std::vector<double>> rows;
    rows.reserve(log.epochs.size());
    for (const auto& e : log.epochs) {
        std::vector<double> row{static_cast<double>(e.epoch)};
        for (double v : e.train_task_mse) row.push_back(v);
        for (double v : e.val_task_mse) row.push_back(v);
        rows.push_back(std::move(row));
    }
    write_csv(path, header, rows);
}

MetricReport evaluate_predictions_csv(const std::string& path) {
    const CsvTable table = read_csv(path);
    const int actual_col = table.column("actual");
    const int predicted_col = table.column("predicted");
    if (actual_col < 0 || predicted_col < 0) {
        throw Error(ErrorCode::IoError, "'" + path + "' needs 'actual' and 'predicted' columns");
    }
    const int n = static_cast<int>(table.rows.size());
    if (n == 0) {
        throw Error(ErrorCode::IoError, "'" + path + "' has no data rows");
    }
    Tensor actual({n});
    Tensor predicted({n});
    for (int i = 0; i < n; ++i) {
        actual[i] = table.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(actual_col)];
        predicted[i] = table.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(predicted_col)];
    }
    return compute_metrics(actual, predicted);
}

namespace {

struct StageLogger {
    std::ofstream out;

    explicit StageLogger(const fs::path& path) : out(path) {}

    void line(const std::string& text) {
        const auto now = std::chrono::system_clock::now().time_since_epoch();
        const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now).count();
        out << "[" << ms << "] " << text << '\n';
        out.flush();
    }
};

[[noreturn]] void rethrow_with_stage(const Error& e, const std::string& stage) {
    throw Error(e.code(), "stage " + stage + ": " + e.what());
}

Tensor denormalize(Tensor values, const NormStats& stats) {
    for (int i = 0; i < values.size(); ++i) values[i] = values[i] * stats.std + stats.mean;
    return values;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& config) {
    config.validate();
    const fs::path outdir(config.output_dir);
    fs::create_directories(outdir);
    StageLogger log(outdir / "run.log");

    save_json_file((outdir / "config.json").string(), json(config));

    // --- decompose (lag-independent, done once) ---
    TimeSeries original("original", {0.0});
    try {
        original = series_from_csv(config.input_csv, "original", config.interpolate_missing);
    } catch (const Error& e) {
        rethrow_with_stage(e, "ingest");
    }
    log.line("ingest: " + std::to_string(original.length()) + " samples from " + config.input_csv);

    // decomposition randomness comes from its own rng_seed so a separately
    // run `decompose` reproduces this stage bit-exactly
    const DecompositionConfig& dec = config.decomposition;
    ImfSet components{{}, original, original.length(), {}};
    try {
        components = eemd(original, dec);
        write_decomposition_csv((outdir / "decomposition.csv").string(), components);
        save_json_file((outdir / "decomposition.json").string(),
                       decomposition_sidecar(components, dec));
    } catch (const Error& e) {
        rethrow_with_stage(e, "decompose");
    }
    log.line("decompose: " + std::to_string(components.imfs.size()) + " IMFs + residual");

    // --- select ---
    SimilarityReport report;
    FeatureGrouping grouping;
    try {
        report = similarity_report(original, components, config.selection.fold_negative_correlation);
        grouping = group_features(report, config.selection.num_clusters,
                                  config.selection.drop_least_related);
        save_json_file((outdir / "grouping.json").string(), grouping_document(report, grouping));
    } catch (const Error& e) {
        rethrow_with_stage(e, "select");
    }
    log.line("select: " + std::to_string(grouping.task_indices.size()) + " task / " +
             std::to_string(grouping.view_indices.size()) + " view / " +
             std::to_string(grouping.dropped_indices.size()) + " dropped");

    const std::vector<std::string> methods{"self_boosted", "mtl_only", "mtv_only", "persistence",
                                           "ar"};
    ExperimentReport result;
    result.methods = methods;
    result.lags = config.lags;
    result.metrics.assign(methods.size(), {});

    for (std::size_t lag_index = 0; lag_index < config.lags.size(); ++lag_index) {
        const int lag = config.lags[lag_index];
        const fs::path lag_dir = outdir / ("lag_" + std::to_string(lag));
        fs::create_directories(lag_dir);

        ArchitectureConfig arch;
        PreparedChannels prepared;
        WindowedDataset train_ds, val_ds, test_ds;
        std::array<int, 3> offsets{};
        try {
            arch = resolve_architecture(config.architecture, lag, config.horizon);
            save_json_file((lag_dir / "architecture.json").string(), json(arch));
            prepared = normalize_channels(original, components, lag, config.horizon, config.split);
            const WindowedDataset dataset =
                build_model_dataset(prepared, grouping, lag, config.horizon);
            auto splits = chronological_split(dataset, config.split);
            train_ds = std::move(splits[0]);
            val_ds = std::move(splits[1]);
            test_ds = std::move(splits[2]);
            offsets = {0, train_ds.num_samples(), train_ds.num_samples() + val_ds.num_samples()};
        } catch (const Error& e) {
            rethrow_with_stage(e, "prepare lag " + std::to_string(lag));
        }

        // raw-scale windows of the original series for the baselines
        WindowedDataset raw_train, raw_test;
        try {
            const WindowedDataset raw =
                build_windows({original}, {0}, lag, config.horizon);
            auto raw_splits = chronological_split(raw, config.split);
            raw_train = std::move(raw_splits[0]);
            raw_test = std::move(raw_splits[2]);
        } catch (const Error& e) {
            rethrow_with_stage(e, "baseline windows lag " + std::to_string(lag));
        }

        const NormStats& main_stats = prepared.stats.front();
        const Tensor test_actual = denormalize(main_task_actuals(test_ds), main_stats);

        for (std::size_t m = 0; m < methods.size(); ++m) {
            const std::string& method = methods[m];
            const fs::path method_dir = lag_dir / method;
            fs::create_directories(method_dir);
            const std::uint64_t run_seed =
                derive_seed(config.seed, lag_index * 64 + m);
            try {
                MetricReport test_metrics;
                if (method == "persistence" || method == "ar") {
                    const Tensor actual = main_task_actuals(raw_test);
                    Tensor predicted;
                    if (method == "persistence") {
                        predicted = persistence_forecast(raw_test);
                    } else {
                        const int order = config.ar_order > 0 ? std::min(config.ar_order, lag) : lag;
                        predicted = ar_forecast(raw_test, fit_ar_direct(raw_train, order));
                    }
                    write_predictions_csv((method_dir / "predictions_test.csv").string(), actual,
                                          predicted, offsets[2], lag);
                    test_metrics = compute_metrics(actual, predicted);
                } else {
                    ArchitectureConfig run_arch = arch;
                    run_arch.variant = variant_from_name(method);
                    ForecastModel model =
                        ForecastModel::build(run_arch, grouping, derive_seed(run_seed, 0));
                    model.set_channel_stats(prepared.stats);

                    TrainConfig tcfg = config.training;
                    tcfg.seed = derive_seed(run_seed, 1);
                    Trainer trainer(model, train_ds, val_ds, tcfg);
                    trainer.run();
                    save_checkpoint((method_dir / "checkpoint.json").string(), model, &trainer);
                    write_training_log_csv((method_dir / "training_log.csv").string(),
                                           trainer.log(), train_ds.task_names);

                    const WindowedDataset* splits[3] = {&train_ds, &val_ds, &test_ds};
                    const char* split_names[3] = {"train", "validation", "test"};
                    for (int k = 0; k < 3; ++k) {
                        const auto predictions = predict(model, *splits[k]);
                        const Tensor actual =
                            denormalize(main_task_actuals(*splits[k]), main_stats);
                        write_predictions_csv(
                            (method_dir / ("predictions_" + std::string(split_names[k]) + ".csv"))
                                .string(),
                            actual, predictions.front(), offsets[static_cast<std::size_t>(k)], lag);
                        if (k == 2) {
                            test_metrics = compute_metrics(actual, predictions.front());
                        }
                    }
                }
                save_json_file((method_dir / "metrics.json").string(), metrics_to_json(test_metrics));
                result.metrics[m].push_back(test_metrics);
                log.line("lag " + std::to_string(lag) + " " + method +
                         ": test rmse = " + format_double(test_metrics.rmse));
            } catch (const Error& e) {
                rethrow_with_stage(e, method + " lag " + std::to_string(lag));
            }
        }
    }

    write_results_csv((outdir / "results.csv").string(), result);

    // Fig.-3-style companion: min-max normalized RMSE across methods per lag
    {
        std::vector<std::string> header{"method"};
        for (int lag : result.lags) header.push_back("normalized_rmse_lag" + std::to_string(lag));
        std::vector<std::vector<std::string>> rows;
        for (std::size_t m = 0; m < result.methods.size(); ++m) {
            rows.push_back({result.methods[m]});
        }
        for (std::size_t l = 0; l < result.lags.size(); ++l) {
            double lo = result.metrics[0][l].rmse;
            double hi = lo;
            for (const auto& per_method : result.metrics) {
                lo = std::min(lo, per_method[l].rmse);
                hi = std::max(hi, per_method[l].rmse);
            }
            for (std::size_t m = 0; m < result.methods.size(); ++m) {
                const double raw = result.metrics[m][l].rmse;
                const double norm = hi > lo ? (raw - lo) / (hi - lo) : 0.0;
                rows[m].push_back(format_double(norm));
            }
        }
        write_csv_text((outdir / "rmse_normalized.csv").string(), header, rows);
    }

    log.line("done");
    return result;
}

void write_results_csv(const std::string& path, const ExperimentReport& report) {
    std::vector<std::string> header{"method"};
    const char* metric_names[4] = {"rmse", "mae", "mape", "r2"};
    for (const char* metric : metric_names) {
        for (int lag : report.lags) {
            header.push_back(std::string(metric) + "_lag" + std::to_string(lag));
        }
    }
    std::vector<std::vector<std::string>> rows;
    for (std::size_t m = 0; m < report.methods.size(); ++m) {
        std::vector<std::string> row{report.methods[m]};
        for (int metric = 0; metric < 4; ++metric) {
            for (std::size_t l = 0; l < report.lags.size(); ++l) {
                const MetricReport& r = report.metrics[m][l];
                switch (metric) {
                    case 0: row.push_back(format_double(r.rmse)); break;
                    case 1: row.push_back(format_double(r.mae)); break;
                    case 2: row.push_back(r.mape.has_value() ? format_double(*r.mape) : ""); break;
                    case 3: row.push_back(format_double(r.r2)); break;
                }
            }
        }
        rows.push_back(std::move(row));
    }
    write_csv_text(path, header, rows);
}

}  // namespace selfboost
