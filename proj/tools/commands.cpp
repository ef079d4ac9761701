#include "commands.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include "csv.hpp"
#include "manifest.hpp"
#include "ordreg/solver.hpp"
#include "ordreg/synth.hpp"
#include "ranks.hpp"

namespace ordreg::cli {

namespace {

namespace fs = std::filesystem;

std::vector<std::string> split_csv_list(const std::string& raw) {
    std::vector<std::string> items;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = raw.find(',', start);
        if (comma == std::string::npos) {
            items.push_back(raw.substr(start));
            break;
        }
        items.push_back(raw.substr(start, comma - start));
        start = comma + 1;
    }
    return items;
}

std::vector<Index> parse_n_grid(const std::string& raw) {
    std::vector<Index> grid;
    for (const std::string& item : split_csv_list(raw)) {
        char* end = nullptr;
        const long long n = std::strtoll(item.c_str(), &end, 10);
        if (item.empty() || end != item.c_str() + item.size() || n < 1) {
            throw UsageError("--n-grid expects positive integers, got '" +
                             item + "'");
        }
        grid.push_back(static_cast<Index>(n));
    }
    return grid;
}

std::vector<double> parse_lambda_grid(const std::string& raw) {
    std::vector<double> grid;
    for (const std::string& item : split_csv_list(raw)) {
        char* end = nullptr;
        const double lambda = std::strtod(item.c_str(), &end);
        if (item.empty() || end != item.c_str() + item.size() ||
            !std::isfinite(lambda) || lambda < 0.0) {
            throw UsageError(
                "--grid expects non-negative decimals, got '" + item + "'");
        }
        grid.push_back(lambda);
    }
    return grid;
}

void ensure_directory(const std::string& dir) {
    if (dir.empty()) {
        throw UsageError("--out directory is required");
    }
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw Error("cannot create output directory '" + dir +
                    "': " + ec.message());
    }
}

std::string join_path(const std::string& dir, const char* name) {
    return (fs::path(dir) / name).string();
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot open '" + path + "' for writing");
    }
    out << content;
    if (!out) {
        throw Error("write failed for '" + path + "'");
    }
}

void verify_digest(const Manifest& manifest, const std::string& key,
                   const std::string& path) {
    const std::string expected = manifest.get(key);
    const std::string actual = digest_file(path);
    if (expected != actual) {
        throw ParseError("digest mismatch for '" + path + "': manifest has " +
                         expected + " but the file is " + actual +
                         " (content changed since the recorded run)");
    }
}

const char* stop_label(const solver::RestartSummary& summary) {
    if (summary.degenerate) {
        return "degenerate";
    }
    return summary.stopped_by_rule ? "rule" : "cap";
}

std::string fit_summary_text(const solver::FitResult& result,
                             double lambda) {
    std::ostringstream out;
    out << "command fit\n";
    out << "objective_value " << format_value(result.objective.value())
        << '\n';
    out << "concordant_count " << result.objective.concordant_count << '\n';
    out << "normalizer " << result.objective.normalizer << '\n';
    if (result.penalized_value.has_value()) {
        out << "penalized_value " << format_value(*result.penalized_value)
            << '\n';
    }
    out << "lambda " << format_value(lambda) << '\n';
    out << "chosen_restart " << result.restart_index << '\n';
    out << "sweeps_used " << result.sweeps_used << '\n';
    for (const auto& restart : result.restarts) {
        out << "restart " << restart.index << " sweeps " << restart.sweeps
            << " stop " << stop_label(restart) << " final_count "
            << restart.final_count << '\n';
    }
    return out.str();
}

int run_fit(const FitOptions& options) {
    const CsvMatrix x = read_matrix(options.x_path);
    const CsvMatrix y = read_matrix(options.y_path);
    const DataSet data = DataSet::create(x.values, y.values);

    solver::FitConfig config;
    config.restarts = options.restarts;
    config.lambda = options.lambda;
    config.max_sweeps = options.max_sweeps;
    config.seed = options.seed;

    const solver::FitResult result = solver::fit(data, config);

    ensure_directory(options.out_dir);
    write_matrix(join_path(options.out_dir, "coefficients.csv"),
                 result.b_hat.B);
    write_text(join_path(options.out_dir, "summary.txt"),
               fit_summary_text(result, options.lambda));

    Manifest manifest;
    manifest.set("command", "fit");
    manifest.set("artifact_version", kVersion);
    manifest.set("x", options.x_path);
    manifest.set("y", options.y_path);
    manifest.set("x_digest", digest_file(options.x_path));
    manifest.set("y_digest", digest_file(options.y_path));
    manifest.set("lambda", options.lambda);
    manifest.set("restarts", static_cast<std::int64_t>(options.restarts));
    manifest.set("max_sweeps",
                 static_cast<std::int64_t>(options.max_sweeps));
    manifest.set("seed", options.seed);
    manifest.set("out", options.out_dir);
    manifest.save(join_path(options.out_dir, "manifest.txt"));
    return 0;
}

int run_predict(const PredictOptions& options) {
    if (options.emit != "scores" && options.emit != "ranks") {
        throw UsageError("--emit must be 'scores' or 'ranks', got '" +
                         options.emit + "'");
    }
    const CsvMatrix b = read_matrix(options.b_path);
    const CsvMatrix x = read_matrix(options.x_path);
    const CoefficientMatrix coefficients{b.values,
                                         is_canonical(b.values)};
    const Matrix scores = solver::predict(coefficients, x.values);
    const Matrix output =
        options.emit == "ranks" ? score_ranks(scores) : scores;

    ensure_directory(options.out_dir);
    write_matrix(join_path(options.out_dir, "predictions.csv"), output);

    Manifest manifest;
    manifest.set("command", "predict");
    manifest.set("artifact_version", kVersion);
    manifest.set("b", options.b_path);
    manifest.set("x", options.x_path);
    manifest.set("b_digest", digest_file(options.b_path));
    manifest.set("x_digest", digest_file(options.x_path));
    manifest.set("emit", options.emit);
    manifest.set("out", options.out_dir);
    manifest.save(join_path(options.out_dir, "manifest.txt"));
    return 0;
}

int run_simulate(const SimulateOptions& options) {
    const std::vector<Index> grid = parse_n_grid(options.n_grid);
    const auto noise = synth::parse_noise(options.noise);
    if (!noise.has_value()) {
        throw UsageError("--noise must be E1, E2, or E3, got '" +
                         options.noise + "'");
    }
    const auto utility = synth::parse_utility(options.utility);
    if (!utility.has_value()) {
        throw UsageError("--utility must be U1, U2, or U3, got '" +
                         options.utility + "'");
    }
    if (options.p < 1 || options.q < 2) {
        throw UsageError("sizes need --p >= 1 and --q >= 2");
    }

    synth::ExperimentConfig config;
    config.p = static_cast<Index>(options.p);
    config.q = static_cast<Index>(options.q);
    config.density = options.density;
    config.noise = *noise;
    config.utility = *utility;
    config.noise_ratio = options.noise_ratio;
    config.runs = options.runs;
    config.fit.lambda = options.lambda;
    config.fit.seed = options.seed;

    const std::vector<synth::ExperimentRow> table =
        synth::run_consistency_experiment(config, grid);

    std::ostringstream csv;
    const bool penalized = options.lambda > 0.0;
    csv << "n,noise,utility,median_m1,median_m2";
    if (penalized) {
        csv << ",median_signed_sensitivity,median_specificity";
    }
    csv << '\n';
    for (const auto& row : table) {
        csv << row.n << ',' << synth::to_string(row.noise) << ','
            << synth::to_string(row.utility) << ','
            << format_value(row.median_m1) << ','
            << format_value(row.median_m2);
        if (penalized) {
            csv << ',';
            if (row.median_signed_sensitivity.has_value()) {
                csv << format_value(*row.median_signed_sensitivity);
            }
            csv << ',';
            if (row.median_specificity.has_value()) {
                csv << format_value(*row.median_specificity);
            }
        }
        csv << '\n';
    }

    ensure_directory(options.out_dir);
    write_text(join_path(options.out_dir, "experiment.csv"), csv.str());

    Manifest manifest;
    manifest.set("command", "simulate");
    manifest.set("artifact_version", kVersion);
    manifest.set("n_grid", options.n_grid);
    manifest.set("p", options.p);
    manifest.set("q", options.q);
    manifest.set("noise", options.noise);
    manifest.set("utility", options.utility);
    manifest.set("density", options.density);
    manifest.set("lambda", options.lambda);
    manifest.set("noise_ratio", options.noise_ratio);
    manifest.set("runs", static_cast<std::int64_t>(options.runs));
    manifest.set("seed", options.seed);
    manifest.set("out", options.out_dir);
    manifest.save(join_path(options.out_dir, "manifest.txt"));
    return 0;
}

int run_ratings(const RatingsOptions& options) {
    if (options.mode != "to-ratings" && options.mode != "to-ranks") {
        throw UsageError("--mode must be 'to-ratings' or 'to-ranks', got '" +
                         options.mode + "'");
    }
    const CsvMatrix input = read_matrix(options.input_path);
    const Matrix converted = options.mode == "to-ratings"
                                 ? ordering_to_ratings(input.values)
                                 : score_ranks(input.values);

    ensure_directory(options.out_dir);
    write_matrix(join_path(options.out_dir, "converted.csv"), converted);

    Manifest manifest;
    manifest.set("command", "ratings");
    manifest.set("artifact_version", kVersion);
    manifest.set("input", options.input_path);
    manifest.set("input_digest", digest_file(options.input_path));
    manifest.set("mode", options.mode);
    manifest.set("out", options.out_dir);
    manifest.save(join_path(options.out_dir, "manifest.txt"));
    return 0;
}

} // namespace

int cmd_fit(const FitOptions& options) { return run_fit(options); }

int cmd_predict(const PredictOptions& options) {
    return run_predict(options);
}

int cmd_evaluate(const EvaluateOptions& options) {
    const CsvMatrix predicted = read_matrix(options.pred_path);
    const CsvMatrix truth = read_matrix(options.truth_path);
    if (options.verbose) {
        const auto q = static_cast<std::size_t>(predicted.values.cols());
        for (Index i = 0; i < predicted.values.rows(); ++i) {
            const double tau =
                kendall_tau({predicted.values.row(i).data(), q},
                            {truth.values.row(i).data(), q});
            std::cout << "row " << (i + 1) << ' ' << format_value(tau)
                      << '\n';
        }
    }
    const double mean =
        average_row_kendall(predicted.values, truth.values);
    std::cout << "mean " << format_value(mean) << '\n';
    return 0;
}

int cmd_simulate(const SimulateOptions& options) {
    return run_simulate(options);
}

int cmd_ratings(const RatingsOptions& options) {
    return run_ratings(options);
}

int cmd_cv(const CvOptions& options) {
    const std::vector<double> grid = parse_lambda_grid(options.grid);
    const CsvMatrix x = read_matrix(options.x_path);
    const CsvMatrix y = read_matrix(options.y_path);
    const DataSet data = DataSet::create(x.values, y.values);

    solver::FitConfig config;
    config.seed = options.seed;

    const solver::CrossValidationResult result =
        solver::cross_validate_lambda(data, grid, options.folds, config);
    for (const auto& score : result.scores) {
        std::cout << "lambda " << format_value(score.lambda);
        if (score.failed) {
            std::cout << " failed\n";
        } else {
            std::cout << " mean_kendall " << format_value(score.mean_kendall)
                      << '\n';
        }
    }
    std::cout << "best_lambda " << format_value(result.best_lambda) << '\n';
    return 0;
}

int cmd_replay(const ReplayOptions& options) {
    const Manifest manifest = Manifest::load(options.manifest_path);
    const std::string command = manifest.get("command");
    const std::string out_dir =
        options.out_dir.empty() ? manifest.get("out") : options.out_dir;

    if (command == "fit") {
        verify_digest(manifest, "x_digest", manifest.get("x"));
        verify_digest(manifest, "y_digest", manifest.get("y"));
        FitOptions fit;
        fit.x_path = manifest.get("x");
        fit.y_path = manifest.get("y");
        fit.out_dir = out_dir;
        fit.lambda = manifest.get_double("lambda");
        fit.restarts = static_cast<int>(manifest.get_i64("restarts"));
        fit.max_sweeps = static_cast<int>(manifest.get_i64("max_sweeps"));
        fit.seed = manifest.get_u64("seed");
        return cmd_fit(fit);
    }
    if (command == "predict") {
        verify_digest(manifest, "b_digest", manifest.get("b"));
        verify_digest(manifest, "x_digest", manifest.get("x"));
        PredictOptions predict;
        predict.b_path = manifest.get("b");
        predict.x_path = manifest.get("x");
        predict.out_dir = out_dir;
        predict.emit = manifest.get("emit");
        return cmd_predict(predict);
    }
    if (command == "simulate") {
        SimulateOptions simulate;
        simulate.n_grid = manifest.get("n_grid");
        simulate.p = manifest.get_i64("p");
        simulate.q = manifest.get_i64("q");
        simulate.noise = manifest.get("noise");
        simulate.utility = manifest.get("utility");
        simulate.density = manifest.get_double("density");
        simulate.lambda = manifest.get_double("lambda");
        simulate.noise_ratio = manifest.get_double("noise_ratio");
        simulate.runs = static_cast<int>(manifest.get_i64("runs"));
        simulate.seed = manifest.get_u64("seed");
        simulate.out_dir = out_dir;
        return cmd_simulate(simulate);
    }
    if (command == "ratings") {
        verify_digest(manifest, "input_digest", manifest.get("input"));
        RatingsOptions ratings;
        ratings.input_path = manifest.get("input");
        ratings.mode = manifest.get("mode");
        ratings.out_dir = out_dir;
        return cmd_ratings(ratings);
    }
    throw ParseError("manifest command '" + command +
                     "' is not replayable");
}

} // namespace ordreg::cli
