#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "ordreg/core.hpp"
#include "ordreg/stepmax.hpp"

namespace ordreg::solver {

// Knobs for fit(). `threads` controls restart execution only: 0 means one
// thread per hardware core, 1 means serial. Results are identical for
// every thread count (restarts are independent and merged by a
// deterministic reduction), so `threads` is absent from result metadata.
struct FitConfig {
    int restarts = 10;
    double lambda = 0.0;
    int max_sweeps = 100;
    std::uint64_t seed = 1;
    int threads = 1;
};

// What happened to one restart, in restart-index order.
struct RestartSummary {
    int index = 0;
    bool degenerate = false;      // aborted: canonical form undefined
    bool stopped_by_rule = false; // halted by the no-improvement rule
    int sweeps = 0;
    std::int64_t final_count = 0;
    double final_penalized = 0.0; // count - lambda * nnz(B)
};

struct FitResult {
    CoefficientMatrix b_hat;  // canonical
    ObjectiveValue objective; // recomputed from scratch at b_hat
    // (count - lambda * nnz) / normalizer; present only when lambda > 0.
    std::optional<double> penalized_value;
    int sweeps_used = 0;
    int restart_index = 0;
    // Winning restart's per-sweep objective (normalized; penalized when
    // lambda > 0). Non-decreasing, except that with lambda > 0 the final
    // entry may dip: canonicalization can spread support and raise the
    // penalty, which is precisely the event that stops the run.
    std::vector<double> trace;
    std::vector<RestartSummary> restarts;
};

// Instrumentation hook for tests: called after every coordinate write and
// after every end-of-sweep canonicalization. `B` is the solver's working
// matrix at that moment; `count` its running exact concordant-pair count.
// With threads > 1 callbacks arrive concurrently from worker threads.
class CoordinateObserver {
public:
    virtual ~CoordinateObserver() = default;
    virtual void after_coordinate(int /*restart*/, int /*sweep*/,
                                  Index /*r*/, Index /*s*/,
                                  const Matrix& /*B*/,
                                  std::int64_t /*count*/) {}
    virtual void after_sweep(int /*restart*/, int /*sweep*/,
                             const Matrix& /*B*/, std::int64_t /*count*/) {}
};

// The one-dimensional problem in coordinate (r, s) of B (0-based), holding
// every other entry fixed: one term per (instance i, response j != s) with
// Y(i,j) != Y(i,s). For Y(i,j) > Y(i,s) the pair is matched iff the score
// gap stays positive:   u_t = x_i.(b_j - b_s) + X(i,r) * B(r,s),
// v_t = -X(i,r); for Y(i,j) < Y(i,s) the mirrored term with v_t = +X(i,r).
// T <= n * (q - 1).
stepmax::StepSumProblem coordinate_problem(const DataSet& data,
                                           const CoefficientMatrix& B,
                                           Index r, Index s);

// One full pass over all p*q coordinates in row-major order (r outer,
// s inner), each set to its exact conditional maximizer (L0 rule when
// lambda > 0), followed by canonicalization. Returns the new matrix and
// its freshly recomputed objective. DegenerateMatrix propagates from the
// canonicalization step.
std::pair<CoefficientMatrix, ObjectiveValue>
sweep(const DataSet& data, const CoefficientMatrix& B, double lambda);

// Multi-start coordinate ascent. Each restart k draws its initial matrix
// from a standard normal stream seeded with substream_seed(config.seed, k),
// canonicalizes it, and sweeps until a full sweep fails to strictly
// increase the exact objective (integer count for lambda = 0, count minus
// lambda * nnz otherwise) or max_sweeps is reached. Restarts that hit
// DegenerateMatrix are dropped; if all drop, AllRestartsDegenerate.
// The best final objective wins, ties to the lower restart index.
// Deterministic given (data, config), whatever `threads` is.
FitResult fit(const DataSet& data, const FitConfig& config,
              CoordinateObserver* observer = nullptr);

// Score rows X_new * B; each row's ordering is the prediction.
Matrix predict(const CoefficientMatrix& B_hat, const Matrix& X_new);

struct LambdaScore {
    double lambda = 0.0;
    double mean_kendall = 0.0; // mean held-out average_row_kendall
    bool failed = false;       // some fold threw; candidate disqualified
};

struct CrossValidationResult {
    double best_lambda = 0.0;
    std::vector<LambdaScore> scores; // in grid order
};

// Instance-level k-fold cross-validation of lambda: rows are shuffled by
// a stream split from config.seed (id 0), cut into `folds` contiguous
// blocks, and each lambda is scored by the mean held-out row Kendall of
// predictions from fits on the complement (fold f fits use substream
// id 1 + f, shared across lambdas so candidates see paired restarts).
// Highest mean wins; ties go to the smaller lambda.
CrossValidationResult cross_validate_lambda(const DataSet& data,
                                            std::span<const double> grid,
                                            int folds,
                                            const FitConfig& config);

} // namespace ordreg::solver
