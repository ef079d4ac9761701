#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ordreg/core.hpp"
#include "ordreg/solver.hpp"

namespace ordreg::synth {

// E1: standard normal. E2: standard Cauchy (t with one degree of
// freedom). E3: two-component Gaussian mixture, N(0, 0.2) with
// probability 0.8 and N(1, 0.2) with probability 0.2, variances 0.2.
enum class NoiseKind { E1, E2, E3 };

// U1: identity. U2: sigmoid x -> 1 / (1 + exp(-x / 5)). U3: floor.
// All monotone non-decreasing; U3 introduces ties.
enum class UtilityKind { U1, U2, U3 };

const char* to_string(NoiseKind kind);
const char* to_string(UtilityKind kind);
std::optional<NoiseKind> parse_noise(std::string_view name);
std::optional<UtilityKind> parse_utility(std::string_view name);

// One benchmark scenario. `fit.seed` is the master seed for the whole
// experiment; see run_consistency_experiment for the derivation of
// per-run streams. `n` is the default problem size when the runner gets
// an empty grid.
struct ExperimentConfig {
    Index n = 128;
    Index p = 5;
    Index q = 5;
    double density = 0.75; // fraction of nonzero entries in the truth
    NoiseKind noise = NoiseKind::E1;
    UtilityKind utility = UtilityKind::U1;
    double noise_ratio = 0.2; // target ||E||_F / ||X B*||_F
    int runs = 10;
    solver::FitConfig fit;
};

// Rows i.i.d. N(0, Sigma) with Sigma[i][j] = 0.7^|i-j|, realized by the
// lower-triangular Cholesky factor of Sigma applied to standard normals
// (one row of p draws per instance, row by row).
Matrix gen_predictors(Index n, Index p, std::uint64_t seed);

// Sparse ground truth: ceil(density * p * q) entries chosen uniformly
// without replacement get i.i.d. N(0,1) values, the rest are zero; the
// result is canonicalized. Attempt a (0-based) draws its stream from
// substream_seed(seed, a); a draw is rejected and retried when
// canonicalization degenerates or the canonical matrix has rank below
// min(2, p, q - 1) (the last column is structurally zero, so q - 1 caps
// the achievable rank). GenerationFailed after 100 attempts.
CoefficientMatrix gen_coefficients(Index p, Index q, double density,
                                   std::uint64_t seed);

// n x q matrix of i.i.d. draws from the chosen noise family.
Matrix gen_noise(Index n, Index q, NoiseKind kind, std::uint64_t seed);

// Rescales E so that ||E'||_F / ||signal||_F == ratio (exact to 1e-12).
Matrix scale_noise(const Matrix& E, const Matrix& signal,
                   double ratio = 0.2);

// Elementwise application of the utility.
Matrix apply_utility(const Matrix& M, UtilityKind kind);

// Squared Frobenius distance between the estimate and the truth.
double metric_m1(const Matrix& b_tilde, const Matrix& b_star);

// Pearson correlation between the p*q entries of the two matrices after
// centering each by its own mean. ZeroVariance when either is constant.
double metric_m2(const Matrix& b_tilde, const Matrix& b_star);

// Support-recovery quality against an exactly sparse truth. A metric is
// absent when its denominator is empty (no nonzeros in B*, or no zeros).
struct SelectionMetrics {
    std::optional<double> signed_sensitivity; // correct-sign nonzeros
    std::optional<double> specificity;        // exact zeros kept zero
};
SelectionMetrics selection_metrics(const Matrix& b_hat,
                                   const Matrix& b_star);

// One generated problem instance plus the seed its fit should use.
struct GeneratedData {
    DataSet data;
    CoefficientMatrix b_star;
    std::uint64_t fit_seed = 0;
};

// Builds Y = U(X B* + E') at size n from `run_seed`, with role streams
// substream_seed(run_seed, 1..4) for X, B*, E, and the fit.
GeneratedData gen_dataset(const ExperimentConfig& config, Index n,
                          std::uint64_t run_seed);

struct ExperimentRow {
    Index n = 0;
    NoiseKind noise = NoiseKind::E1;
    UtilityKind utility = UtilityKind::U1;
    double median_m1 = 0.0;
    double median_m2 = 0.0;
    // Present when the fit is penalized and the metric was defined in at
    // least one run.
    std::optional<double> median_signed_sensitivity;
    std::optional<double> median_specificity;
};

// For each n in the grid (or {config.n} when the grid is empty): generate
// `runs` independent datasets with fresh truths, fit each, and report the
// per-n medians of M1 and M2 (and of the selection metrics when
// config.fit.lambda > 0). Seeding: with master = config.fit.seed,
// run j at size n uses run_seed = substream_seed(substream_seed(master,
// n), j), so the table is a pure function of config regardless of run
// scheduling. GenerationFailed and AllRestartsDegenerate propagate with
// the offending (n, run) prepended to the message.
std::vector<ExperimentRow>
run_consistency_experiment(const ExperimentConfig& config,
                           std::span<const Index> n_grid);

} // namespace ordreg::synth
