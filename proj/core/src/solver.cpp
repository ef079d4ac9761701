#include "ordreg/solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <string>
#include <thread>

#include "ordreg/rng.hpp"

namespace ordreg::solver {

namespace {

std::int64_t nonzero_count(const Matrix& B) {
    std::int64_t nnz = 0;
    for (Index r = 0; r < B.rows(); ++r) {
        for (Index s = 0; s < B.cols(); ++s) {
            nnz += (B(r, s) != 0.0) ? 1 : 0;
        }
    }
    return nnz;
}

// count - lambda * nnz: the exact quantity the stopping rule compares.
// Integer-valued when lambda is, exact in double for desk-scale counts.
double penalized_of(std::int64_t count, std::int64_t nnz, double lambda) {
    return static_cast<double>(count) - lambda * static_cast<double>(nnz);
}

void check_config(const FitConfig& config) {
    if (config.restarts < 1) {
        throw Error("restarts must be >= 1");
    }
    if (config.max_sweeps < 1) {
        throw Error("max_sweeps must be >= 1");
    }
    if (!(config.lambda >= 0.0)) {
        throw Error("lambda must be a non-negative real");
    }
    if (config.threads < 0) {
        throw Error("threads must be >= 0 (0 = hardware concurrency)");
    }
}

// Coordinate-ascent state for one matrix: the working B, its score matrix
// S = X * B maintained incrementally (one column per coordinate write),
// and the exact concordant-pair count kept in lockstep with S. A
// coordinate candidate is scored by direct comparisons on the
// hypothetically updated score column, and accepted only if that exact
// count (penalized when lambda > 0) does not fall below the current one,
// so the running count never decreases within a sweep. At the end of each
// sweep the matrix is canonicalized and S and the count are rebuilt from
// scratch; those fresh values drive the stopping rule.
class Engine {
public:
    Engine(const DataSet& data, Matrix b)
        : data_(data), B_(std::move(b)) {
        rebuild();
    }

    const Matrix& B() const { return B_; }
    std::int64_t count() const { return count_; }

    // One full row-major pass plus canonicalization; returns the fresh
    // penalized objective (== count when lambda is 0).
    double sweep_once(double lambda, CoordinateObserver* observer,
                      int restart, int sweep_no) {
        const Index p = data_.p();
        const Index q = data_.q();
        for (Index r = 0; r < p; ++r) {
            for (Index s = 0; s < q; ++s) {
                update_coordinate(r, s, lambda);
                if (observer != nullptr) {
                    observer->after_coordinate(restart, sweep_no, r, s, B_,
                                               count_);
                }
            }
        }
        B_ = canonicalize(B_).B;
        rebuild();
        if (observer != nullptr) {
            observer->after_sweep(restart, sweep_no, B_, count_);
        }
        return penalized_of(count_, nonzero_count(B_), lambda);
    }

private:
    void rebuild() {
        S_ = data_.X * B_;
        count_ = concordant_pair_count(data_.Y, S_);
    }

    // Satisfied-pair count for column s if B(r,s) were set to z, by
    // direct strict comparisons against the updated column values
    // S(i,s) + X(i,r) * (z - B(r,s)). Fills new_col_ with those values so
    // an accepting write stores exactly what was counted.
    std::int64_t evaluate_candidate(Index r, Index s, double z) {
        const Index n = data_.n();
        const Index q = data_.q();
        const double dz = z - B_(r, s);
        std::int64_t sat = 0;
        for (Index i = 0; i < n; ++i) {
            const double updated = S_(i, s) + data_.X(i, r) * dz;
            new_col_[static_cast<std::size_t>(i)] = updated;
            const double* y = data_.Y.row(i).data();
            const double* score = S_.row(i).data();
            const double y_s = y[s];
            for (Index j = 0; j < q; ++j) {
                if (j == s) {
                    continue;
                }
                if (y[j] > y_s) {
                    sat += (score[j] > updated) ? 1 : 0;
                } else if (y[j] < y_s) {
                    sat += (updated > score[j]) ? 1 : 0;
                }
            }
        }
        return sat;
    }

    void write_column(Index r, Index s, double z, std::int64_t sat,
                      std::int64_t cur_sat) {
        const Index n = data_.n();
        B_(r, s) = z;
        for (Index i = 0; i < n; ++i) {
            S_(i, s) = new_col_[static_cast<std::size_t>(i)];
        }
        count_ += sat - cur_sat;
    }

    void update_coordinate(Index r, Index s, double lambda) {
        const Index n = data_.n();
        const Index q = data_.q();
        new_col_.resize(static_cast<std::size_t>(n));
        u_.clear();
        v_.clear();
        const double brs = B_(r, s);

        // Build the step-sum terms and the current satisfied count for
        // this column in one pass over the strict response pairs.
        std::int64_t cur_sat = 0;
        for (Index i = 0; i < n; ++i) {
            const double xir = data_.X(i, r);
            const double s_is = S_(i, s);
            const double* y = data_.Y.row(i).data();
            const double* score = S_.row(i).data();
            const double y_s = y[s];
            for (Index j = 0; j < q; ++j) {
                if (j == s) {
                    continue;
                }
                if (y[j] > y_s) {
                    u_.push_back(score[j] - s_is + xir * brs);
                    v_.push_back(-xir);
                    cur_sat += (score[j] > s_is) ? 1 : 0;
                } else if (y[j] < y_s) {
                    u_.push_back(s_is - score[j] - xir * brs);
                    v_.push_back(xir);
                    cur_sat += (s_is > score[j]) ? 1 : 0;
                }
            }
        }

        const stepmax::StepSumSolution sol =
            stepmax::maximize_step_sum(u_, v_, ws_);

        if (lambda == 0.0) {
            const std::int64_t sat = evaluate_candidate(r, s, sol.x_hat);
            if (sat >= cur_sat) {
                write_column(r, s, sol.x_hat, sat, cur_sat);
            }
            return;
        }

        // L0 rule: pit the unconstrained maximizer against 0, then make
        // sure the winner does not lose to the incumbent entry.
        const std::int64_t sat_zero = evaluate_candidate(r, s, 0.0);
        double z = 0.0;
        std::int64_t sat = sat_zero;
        if (sol.x_hat != 0.0) {
            const std::int64_t sat_hat = evaluate_candidate(r, s, sol.x_hat);
            const double f_hat = static_cast<double>(sat_hat) - lambda;
            if (f_hat > static_cast<double>(sat_zero)) {
                z = sol.x_hat;
                sat = sat_hat;
            }
        }
        const double f_new =
            static_cast<double>(sat) - (z != 0.0 ? lambda : 0.0);
        const double f_cur =
            static_cast<double>(cur_sat) - (brs != 0.0 ? lambda : 0.0);
        if (f_new >= f_cur) {
            if (z == 0.0) {
                // new_col_ may still hold the x_hat column; refresh it
                // for the chosen candidate before writing.
                sat = evaluate_candidate(r, s, z);
            }
            write_column(r, s, z, sat, cur_sat);
        }
    }

    const DataSet& data_;
    Matrix B_;
    Matrix S_;
    std::int64_t count_ = 0;
    stepmax::Workspace ws_;
    std::vector<double> u_;
    std::vector<double> v_;
    std::vector<double> new_col_;
};

struct RestartResult {
    RestartSummary summary;
    Matrix b;
    std::vector<double> trace;
};

RestartResult run_restart(const DataSet& data, const FitConfig& config,
                          int k, CoordinateObserver* observer) {
    RestartResult out;
    out.summary.index = k;

    rng::Generator gen(rng::substream_seed(config.seed,
                                           static_cast<std::uint64_t>(k)));
    Matrix b0(data.p(), data.q());
    for (Index r = 0; r < b0.rows(); ++r) {
        for (Index s = 0; s < b0.cols(); ++s) {
            b0(r, s) = gen.normal();
        }
    }

    const auto normalizer =
        static_cast<double>(pair_normalizer(data.n(), data.q()));
    try {
        Engine engine(data, canonicalize(b0).B);
        double prev = penalized_of(engine.count(),
                                   nonzero_count(engine.B()), config.lambda);
        for (int sweep_no = 1; sweep_no <= config.max_sweeps; ++sweep_no) {
            const double cur =
                engine.sweep_once(config.lambda, observer, k, sweep_no);
            out.trace.push_back(cur / normalizer);
            out.summary.sweeps = sweep_no;
            if (cur > prev) {
                prev = cur;
            } else {
                out.summary.stopped_by_rule = true;
                break;
            }
        }
        out.summary.final_count = engine.count();
        out.summary.final_penalized = penalized_of(
            engine.count(), nonzero_count(engine.B()), config.lambda);
        out.b = engine.B();
    } catch (const DegenerateMatrix&) {
        out.summary.degenerate = true;
    }
    return out;
}

} // namespace

stepmax::StepSumProblem coordinate_problem(const DataSet& data,
                                           const CoefficientMatrix& B,
                                           Index r, Index s) {
    if (B.B.rows() != data.p() || B.B.cols() != data.q()) {
        throw DimensionMismatch("coefficients are " +
                                std::to_string(B.B.rows()) + "x" +
                                std::to_string(B.B.cols()) +
                                " but data needs " + std::to_string(data.p()) +
                                "x" + std::to_string(data.q()));
    }
    if (r < 0 || r >= data.p() || s < 0 || s >= data.q()) {
        throw IndexOutOfRange("coordinate (" + std::to_string(r) + ", " +
                              std::to_string(s) + ") outside " +
                              std::to_string(data.p()) + "x" +
                              std::to_string(data.q()));
    }
    const Matrix scores = data.X * B.B;
    const Index n = data.n();
    const Index q = data.q();
    const double brs = B.B(r, s);
    stepmax::StepSumProblem prob;
    for (Index i = 0; i < n; ++i) {
        const double xir = data.X(i, r);
        const double s_is = scores(i, s);
        for (Index j = 0; j < q; ++j) {
            if (j == s || data.Y(i, j) == data.Y(i, s)) {
                continue;
            }
            if (data.Y(i, j) > data.Y(i, s)) {
                prob.u.push_back(scores(i, j) - s_is + xir * brs);
                prob.v.push_back(-xir);
            } else {
                prob.u.push_back(s_is - scores(i, j) - xir * brs);
                prob.v.push_back(xir);
            }
        }
    }
    return prob;
}

std::pair<CoefficientMatrix, ObjectiveValue>
sweep(const DataSet& data, const CoefficientMatrix& B, double lambda) {
    if (B.B.rows() != data.p() || B.B.cols() != data.q()) {
        throw DimensionMismatch("coefficient shape does not match data");
    }
    if (!(lambda >= 0.0)) {
        throw Error("lambda must be a non-negative real");
    }
    Engine engine(data, B.B);
    engine.sweep_once(lambda, nullptr, 0, 1);
    CoefficientMatrix out{engine.B(), true};
    return {out, ObjectiveValue{engine.count(),
                                pair_normalizer(data.n(), data.q())}};
}

FitResult fit(const DataSet& data, const FitConfig& config,
              CoordinateObserver* observer) {
    check_config(config);

    const int restarts = config.restarts;
    std::vector<RestartResult> results(static_cast<std::size_t>(restarts));
    std::vector<std::exception_ptr> failures(
        static_cast<std::size_t>(restarts));

    int threads = config.threads;
    if (threads == 0) {
        threads = static_cast<int>(std::thread::hardware_concurrency());
        if (threads < 1) {
            threads = 1;
        }
    }
    threads = std::min(threads, restarts);

    if (threads <= 1) {
        for (int k = 0; k < restarts; ++k) {
            results[static_cast<std::size_t>(k)] =
                run_restart(data, config, k, observer);
        }
    } else {
        std::atomic<int> next{0};
        auto worker = [&]() {
            for (;;) {
                const int k = next.fetch_add(1);
                if (k >= restarts) {
                    return;
                }
                try {
                    results[static_cast<std::size_t>(k)] =
                        run_restart(data, config, k, observer);
                } catch (...) {
                    failures[static_cast<std::size_t>(k)] =
                        std::current_exception();
                }
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int t = 0; t < threads; ++t) {
            pool.emplace_back(worker);
        }
        for (auto& t : pool) {
            t.join();
        }
        for (const auto& failure : failures) {
            if (failure) {
                std::rethrow_exception(failure);
            }
        }
    }

    int best = -1;
    for (int k = 0; k < restarts; ++k) {
        const auto& r = results[static_cast<std::size_t>(k)];
        if (r.summary.degenerate) {
            continue;
        }
        if (best < 0 || r.summary.final_penalized >
                            results[static_cast<std::size_t>(best)]
                                .summary.final_penalized) {
            best = k;
        }
    }
    if (best < 0) {
        throw AllRestartsDegenerate(
            "every restart collapsed to a degenerate matrix (lambda too "
            "large or pathological data)");
    }

    auto& winner = results[static_cast<std::size_t>(best)];
    FitResult out;
    out.b_hat = CoefficientMatrix{std::move(winner.b), true};
    out.objective = ObjectiveValue{winner.summary.final_count,
                                   pair_normalizer(data.n(), data.q())};
    if (config.lambda > 0.0) {
        out.penalized_value =
            winner.summary.final_penalized /
            static_cast<double>(out.objective.normalizer);
    }
    out.sweeps_used = winner.summary.sweeps;
    out.restart_index = best;
    out.trace = std::move(winner.trace);
    out.restarts.reserve(static_cast<std::size_t>(restarts));
    for (auto& r : results) {
        out.restarts.push_back(r.summary);
    }
    return out;
}

Matrix predict(const CoefficientMatrix& B_hat, const Matrix& X_new) {
    if (X_new.cols() != B_hat.B.rows()) {
        throw DimensionMismatch("X_new has " + std::to_string(X_new.cols()) +
                                " columns but coefficients have " +
                                std::to_string(B_hat.B.rows()) + " rows");
    }
    if (!X_new.allFinite()) {
        throw NonFinite("X_new contains NaN or infinity");
    }
    if (!B_hat.B.allFinite()) {
        throw NonFinite("coefficient matrix contains NaN or infinity");
    }
    return X_new * B_hat.B;
}

CrossValidationResult cross_validate_lambda(const DataSet& data,
                                            std::span<const double> grid,
                                            int folds,
                                            const FitConfig& config) {
    check_config(config);
    if (folds < 2) {
        throw InsufficientData("cross-validation needs folds >= 2");
    }
    if (data.n() < folds) {
        throw InsufficientData("cross-validation needs n >= folds, have n=" +
                               std::to_string(data.n()) + ", folds=" +
                               std::to_string(folds));
    }
    if (grid.empty()) {
        throw InsufficientData("lambda grid is empty");
    }
    for (const double lambda : grid) {
        if (!(lambda >= 0.0)) {
            throw Error("lambda grid entries must be non-negative reals");
        }
    }

    const Index n = data.n();
    std::vector<Index> order(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        order[static_cast<std::size_t>(i)] = i;
    }
    rng::Generator shuffler(rng::substream_seed(config.seed, 0));
    for (std::size_t i = order.size() - 1; i > 0; --i) {
        const auto j = static_cast<std::size_t>(
            shuffler.below(static_cast<std::uint64_t>(i + 1)));
        std::swap(order[i], order[j]);
    }

    std::vector<LambdaScore> scores;
    scores.reserve(grid.size());
    for (const double lambda : grid) {
        scores.push_back(LambdaScore{lambda, 0.0, false});
    }

    const Index base_size = n / folds;
    const Index remainder = n % folds;
    Index start = 0;
    for (int f = 0; f < folds; ++f) {
        const Index size = base_size + (f < remainder ? 1 : 0);
        const Index stop = start + size;

        Matrix x_test(size, data.p());
        Matrix y_test(size, data.q());
        Matrix x_train(n - size, data.p());
        Matrix y_train(n - size, data.q());
        Index test_row = 0;
        Index train_row = 0;
        for (Index pos = 0; pos < n; ++pos) {
            const Index source = order[static_cast<std::size_t>(pos)];
            if (pos >= start && pos < stop) {
                x_test.row(test_row) = data.X.row(source);
                y_test.row(test_row) = data.Y.row(source);
                ++test_row;
            } else {
                x_train.row(train_row) = data.X.row(source);
                y_train.row(train_row) = data.Y.row(source);
                ++train_row;
            }
        }
        start = stop;

        const DataSet train =
            DataSet::create(std::move(x_train), std::move(y_train));
        FitConfig fold_config = config;
        fold_config.seed = rng::substream_seed(
            config.seed, 1 + static_cast<std::uint64_t>(f));
        for (auto& score : scores) {
            if (score.failed) {
                continue;
            }
            fold_config.lambda = score.lambda;
            try {
                const FitResult fitted = fit(train, fold_config);
                const Matrix predicted = predict(fitted.b_hat, x_test);
                score.mean_kendall += average_row_kendall(predicted, y_test);
            } catch (const Error&) {
                score.failed = true;
            }
        }
    }

    bool any = false;
    double best_lambda = 0.0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (auto& score : scores) {
        if (score.failed) {
            score.mean_kendall =
                -std::numeric_limits<double>::infinity();
            continue;
        }
        score.mean_kendall /= static_cast<double>(folds);
        const bool better =
            score.mean_kendall > best_score ||
            (score.mean_kendall == best_score && score.lambda < best_lambda);
        if (!any || better) {
            any = true;
            best_score = score.mean_kendall;
            best_lambda = score.lambda;
        }
    }
    if (!any) {
        throw Error("every lambda candidate failed cross-validation");
    }
    return CrossValidationResult{best_lambda, std::move(scores)};
}

} // namespace ordreg::solver
