#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "ordreg/errors.hpp"

namespace {

using namespace ordreg;
using namespace ordreg::cli;

// Exit codes: 0 success, 1 usage, 2 parse (malformed input files or
// manifests), 3 dimension (shape conflicts), 4 solver/domain failures.
int run(int argc, char** argv) {
    CLI::App app{"Order-based multivariate regression: fits a coefficient "
                 "matrix by maximizing rank concordance between responses "
                 "and linear scores."};
    app.set_version_flag("--version", std::string("ordreg ") + kVersion);
    app.require_subcommand(1);

    FitOptions fit;
    CLI::App* cmd_fit_app =
        app.add_subcommand("fit", "Fit coefficients to CSV data");
    cmd_fit_app->add_option("x", fit.x_path, "Predictor CSV (n x p)")
        ->required();
    cmd_fit_app->add_option("y", fit.y_path, "Response CSV (n x q)")
        ->required();
    cmd_fit_app->add_option("--lambda", fit.lambda,
                            "Element-wise L0 penalty (default 0)");
    cmd_fit_app->add_option("--restarts", fit.restarts,
                            "Random restarts (default 10)");
    cmd_fit_app->add_option("--max-sweeps", fit.max_sweeps,
                            "Sweep cap per restart (default 100)");
    cmd_fit_app
        ->add_option("--seed", fit.seed, "Master seed (default 1)")
        ->envname("ORDREG_SEED");
    cmd_fit_app->add_option("--out", fit.out_dir, "Output directory")
        ->required();

    PredictOptions predict;
    CLI::App* cmd_predict_app = app.add_subcommand(
        "predict", "Score new predictor rows under fitted coefficients");
    cmd_predict_app
        ->add_option("b", predict.b_path, "Coefficient CSV (p x q)")
        ->required();
    cmd_predict_app->add_option("x", predict.x_path, "Predictor CSV (m x p)")
        ->required();
    cmd_predict_app->add_option(
        "--emit", predict.emit,
        "What to write: scores (default) or ranks (1 = largest)");
    cmd_predict_app->add_option("--out", predict.out_dir, "Output directory")
        ->required();

    EvaluateOptions evaluate;
    CLI::App* cmd_evaluate_app = app.add_subcommand(
        "evaluate", "Average within-row Kendall tau of two CSVs");
    cmd_evaluate_app
        ->add_option("predicted", evaluate.pred_path, "Predicted rows CSV")
        ->required();
    cmd_evaluate_app
        ->add_option("truth", evaluate.truth_path, "True rows CSV")
        ->required();
    cmd_evaluate_app->add_flag("--verbose", evaluate.verbose,
                               "Also print per-row taus");

    SimulateOptions simulate;
    CLI::App* cmd_simulate_app = app.add_subcommand(
        "simulate", "Synthetic benchmark: emit per-n medians as CSV");
    cmd_simulate_app->add_option(
        "--n-grid", simulate.n_grid,
        "Comma-separated instance counts (default 8..4096 in powers of 2)");
    cmd_simulate_app->add_option("--p", simulate.p,
                                 "Predictor count (default 5)");
    cmd_simulate_app->add_option("--q", simulate.q,
                                 "Response count (default 5)");
    cmd_simulate_app->add_option("--noise", simulate.noise,
                                 "Noise family: E1, E2, or E3 (default E1)");
    cmd_simulate_app->add_option(
        "--utility", simulate.utility,
        "Response transform: U1, U2, or U3 (default U1)");
    cmd_simulate_app->add_option(
        "--density", simulate.density,
        "Fraction of nonzero true coefficients (default 0.75)");
    cmd_simulate_app->add_option("--lambda", simulate.lambda,
                                 "L0 penalty for the fits (default 0)");
    cmd_simulate_app->add_option(
        "--noise-ratio", simulate.noise_ratio,
        "Target noise-to-signal Frobenius ratio (default 0.2)");
    cmd_simulate_app->add_option("--runs", simulate.runs,
                                 "Datasets per grid point (default 10)");
    cmd_simulate_app
        ->add_option("--seed", simulate.seed, "Master seed (default 1)")
        ->envname("ORDREG_SEED");
    cmd_simulate_app
        ->add_option("--out", simulate.out_dir, "Output directory")
        ->required();

    RatingsOptions ratings;
    CLI::App* cmd_ratings_app = app.add_subcommand(
        "ratings", "Convert preference orderings or rating rows");
    cmd_ratings_app
        ->add_option("input", ratings.input_path, "Input CSV")
        ->required();
    cmd_ratings_app
        ->add_option("--mode", ratings.mode,
                     "to-ratings: permutation rows (1 = most preferred) to "
                     "the (q-rank+1)/(q+1) scale; to-ranks: rating rows to "
                     "competition ranks (1 = largest)")
        ->required();
    cmd_ratings_app->add_option("--out", ratings.out_dir, "Output directory")
        ->required();

    CvOptions cv;
    CLI::App* cmd_cv_app = app.add_subcommand(
        "cv", "Cross-validate the L0 penalty over a grid");
    cmd_cv_app->add_option("x", cv.x_path, "Predictor CSV (n x p)")
        ->required();
    cmd_cv_app->add_option("y", cv.y_path, "Response CSV (n x q)")
        ->required();
    cmd_cv_app->add_option("--grid", cv.grid,
                           "Comma-separated lambda values (default 0,5)");
    cmd_cv_app->add_option("--folds", cv.folds, "Fold count (default 5)");
    cmd_cv_app->add_option("--seed", cv.seed, "Master seed (default 1)")
        ->envname("ORDREG_SEED");

    ReplayOptions replay;
    CLI::App* cmd_replay_app = app.add_subcommand(
        "replay", "Re-run a recorded command from its manifest");
    cmd_replay_app
        ->add_option("manifest", replay.manifest_path, "manifest.txt path")
        ->required();
    cmd_replay_app->add_option(
        "--out", replay.out_dir,
        "Override the recorded output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    if (cmd_fit_app->parsed()) {
        return cmd_fit(fit);
    }
    if (cmd_predict_app->parsed()) {
        return cmd_predict(predict);
    }
    if (cmd_evaluate_app->parsed()) {
        return cmd_evaluate(evaluate);
    }
    if (cmd_simulate_app->parsed()) {
        return cmd_simulate(simulate);
    }
    if (cmd_ratings_app->parsed()) {
        return cmd_ratings(ratings);
    }
    if (cmd_cv_app->parsed()) {
        return cmd_cv(cv);
    }
    if (cmd_replay_app->parsed()) {
        return cmd_replay(replay);
    }
    return 1;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const UsageError& e) {
        std::cerr << "ordreg: " << e.what() << '\n';
        return 1;
    } catch (const ParseError& e) {
        std::cerr << "ordreg: " << e.what() << '\n';
        return 2;
    } catch (const NotAPermutation& e) {
        std::cerr << "ordreg: " << e.what() << '\n';
        return 2;
    } catch (const DimensionMismatch& e) {
        std::cerr << "ordreg: " << e.what() << '\n';
        return 3;
    } catch (const IndexOutOfRange& e) {
        std::cerr << "ordreg: " << e.what() << '\n';
        return 3;
    } catch (const Error& e) {
        std::cerr << "ordreg: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "ordreg: " << e.what() << '\n';
        return 4;
    }
}
