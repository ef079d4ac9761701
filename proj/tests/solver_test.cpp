#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "ordreg/core.hpp"
#include "ordreg/rng.hpp"
#include "ordreg/solver.hpp"
#include "ordreg/stepmax.hpp"
#include "ordreg/synth.hpp"

using ordreg::CoefficientMatrix;
using ordreg::DataSet;
using ordreg::Index;
using ordreg::Matrix;
namespace solver = ordreg::solver;

namespace {

Matrix random_matrix(Index rows, Index cols, ordreg::rng::Generator& gen) {
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        for (Index j = 0; j < cols; ++j) {
            m(i, j) = gen.normal();
        }
    }
    return m;
}

DataSet noisy_dataset(Index n, Index p, Index q, std::uint64_t seed) {
    ordreg::rng::Generator gen(seed);
    return DataSet::create(random_matrix(n, p, gen), random_matrix(n, q, gen));
}

// Y = X B* exactly: a fit should be able to reach full concordance.
struct NoiselessCase {
    DataSet data;
    CoefficientMatrix truth;
};

NoiselessCase noiseless_case(Index n, Index p, Index q, std::uint64_t seed) {
    ordreg::rng::Generator gen(seed);
    const Matrix x = random_matrix(n, p, gen);
    const auto truth = ordreg::canonicalize(random_matrix(p, q, gen));
    Matrix y = x * truth.B;
    return NoiselessCase{DataSet::create(x, std::move(y)), truth};
}

bool same_fit(const solver::FitResult& a, const solver::FitResult& b) {
    if (a.b_hat.B != b.b_hat.B || a.trace != b.trace ||
        a.objective.concordant_count != b.objective.concordant_count ||
        a.sweeps_used != b.sweeps_used || a.restart_index != b.restart_index ||
        a.penalized_value != b.penalized_value ||
        a.restarts.size() != b.restarts.size()) {
        return false;
    }
    for (std::size_t k = 0; k < a.restarts.size(); ++k) {
        const auto& ra = a.restarts[k];
        const auto& rb = b.restarts[k];
        if (ra.index != rb.index || ra.degenerate != rb.degenerate ||
            ra.stopped_by_rule != rb.stopped_by_rule ||
            ra.sweeps != rb.sweeps || ra.final_count != rb.final_count ||
            ra.final_penalized != rb.final_penalized) {
            return false;
        }
    }
    return true;
}

} // namespace

TEST_CASE("coordinate_problem: one term per strict response pair") {
    Matrix x(1, 1);
    x << 1.0;
    Matrix y(1, 2);
    y << 2.0, 1.0;
    const auto data = DataSet::create(x, y);
    const CoefficientMatrix zero{Matrix::Zero(1, 2), false};

    // At coordinate (0, 0): the only pair has Y(0,1) < Y(0,0), so the term
    // asks the score gap s_0 - s_1 = B(0,0) * 1 to be positive.
    const auto prob = solver::coordinate_problem(data, zero, 0, 0);
    REQUIRE(prob.size() == 1);
    CHECK(prob.u[0] == 0.0);
    CHECK(prob.v[0] == 1.0);

    const auto sol = ordreg::stepmax::maximize_step_sum(prob);
    CHECK(sol.value == 1);
    CHECK(sol.x_hat == 1.0);

    Matrix solved = zero.B;
    solved(0, 0) = sol.x_hat;
    CHECK(ordreg::concordance_objective(data, solved).concordant_count == 1);
}

TEST_CASE("coordinate_problem: tied responses contribute no terms") {
    Matrix x(2, 1);
    x << 1.0, -1.0;
    Matrix y(2, 2);
    y << 1.0, 1.0, 3.0, 1.0;
    const auto data = DataSet::create(x, y);
    const CoefficientMatrix b{Matrix::Zero(1, 2), false};
    const auto prob = solver::coordinate_problem(data, b, 0, 0);
    // Row 0 is fully tied; only row 1 contributes its single pair.
    CHECK(prob.size() == 1);
}

TEST_CASE("coordinate_problem: size bound and index checks") {
    const auto data = noisy_dataset(12, 3, 4, 5);
    const CoefficientMatrix b{Matrix::Zero(3, 4), false};
    for (Index r = 0; r < 3; ++r) {
        for (Index s = 0; s < 4; ++s) {
            const auto prob = solver::coordinate_problem(data, b, r, s);
            CHECK(prob.size() <= static_cast<std::size_t>(12 * 3));
        }
    }
    CHECK_THROWS_AS(solver::coordinate_problem(data, b, 3, 0),
                    ordreg::IndexOutOfRange);
    CHECK_THROWS_AS(solver::coordinate_problem(data, b, 0, 4),
                    ordreg::IndexOutOfRange);
    CHECK_THROWS_AS(solver::coordinate_problem(data, b, -1, 0),
                    ordreg::IndexOutOfRange);
    const CoefficientMatrix wrong{Matrix::Zero(4, 4), false};
    CHECK_THROWS_AS(solver::coordinate_problem(data, wrong, 0, 0),
                    ordreg::DimensionMismatch);
}

TEST_CASE("coordinate_problem: maximizer is conditionally optimal") {
    // Setting B(r,s) to the step-sum maximizer must beat every other
    // candidate value of that entry against the real objective.
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto data = noisy_dataset(10, 2, 3, seed);
        ordreg::rng::Generator gen(ordreg::rng::substream_seed(seed, 9));
        const auto start = ordreg::canonicalize(random_matrix(2, 3, gen));
        for (Index r = 0; r < 2; ++r) {
            for (Index s = 0; s < 3; ++s) {
                const auto prob =
                    solver::coordinate_problem(data, start, r, s);
                const auto sol = ordreg::stepmax::maximize_step_sum(prob);

                Matrix updated = start.B;
                updated(r, s) = sol.x_hat;
                const auto after =
                    ordreg::concordance_objective(data, updated);
                const auto before =
                    ordreg::concordance_objective(data, start.B);
                REQUIRE(after.concordant_count >= before.concordant_count);

                // Candidates: one point inside every interval between
                // breakpoints, plus the incumbent, zero, and random draws.
                std::vector<double> points;
                for (std::size_t t = 0; t < prob.size(); ++t) {
                    if (prob.v[t] != 0.0) {
                        const double ratio = -prob.u[t] / prob.v[t];
                        if (std::isfinite(ratio)) {
                            points.push_back(ratio);
                        }
                    }
                }
                std::sort(points.begin(), points.end());
                points.erase(std::unique(points.begin(), points.end()),
                             points.end());
                std::vector<double> candidates{0.0, start.B(r, s)};
                if (!points.empty()) {
                    candidates.push_back(points.front() - 1.0);
                    candidates.push_back(points.back() + 1.0);
                    for (std::size_t t = 0; t + 1 < points.size(); ++t) {
                        candidates.push_back(points[t] / 2 +
                                             points[t + 1] / 2);
                    }
                }
                for (int extra = 0; extra < 5; ++extra) {
                    candidates.push_back(3.0 * gen.normal());
                }
                for (const double z : candidates) {
                    Matrix probe = start.B;
                    probe(r, s) = z;
                    const auto v = ordreg::concordance_objective(data, probe);
                    REQUIRE(v.concordant_count <= after.concordant_count);
                }
            }
        }
    }
}

TEST_CASE("sweep: canonical output, recomputed objective, no decrease") {
    for (std::uint64_t seed = 30; seed < 36; ++seed) {
        const auto data = noisy_dataset(20, 2, 3, seed);
        ordreg::rng::Generator gen(ordreg::rng::substream_seed(seed, 4));
        const auto start = ordreg::canonicalize(random_matrix(2, 3, gen));

        const auto [b1, val1] = solver::sweep(data, start, 0.0);
        CHECK(b1.canonical);
        CHECK(ordreg::is_canonical(b1.B));
        CHECK(val1.concordant_count ==
              ordreg::concordance_objective(data, b1).concordant_count);
        CHECK(val1.concordant_count >=
              ordreg::concordance_objective(data, start).concordant_count);
    }
}

TEST_CASE("sweep: argument validation and degenerate collapse") {
    const auto data = noisy_dataset(16, 2, 3, 77);
    ordreg::rng::Generator gen(78);
    const auto start = ordreg::canonicalize(random_matrix(2, 3, gen));
    CHECK_THROWS_AS(solver::sweep(data, start, -1.0), ordreg::Error);
    const CoefficientMatrix wrong{Matrix::Zero(3, 3), false};
    CHECK_THROWS_AS(solver::sweep(data, wrong, 0.0),
                    ordreg::DimensionMismatch);
    // A penalty no coordinate can pay zeroes the whole matrix.
    CHECK_THROWS_AS(solver::sweep(data, start, 1e9), ordreg::DegenerateMatrix);
}

TEST_CASE("fit: reaches full concordance on noiseless data") {
    const auto toy = noiseless_case(64, 3, 3, 41);
    solver::FitConfig config;
    config.restarts = 5;
    config.seed = 17;
    const auto result = solver::fit(toy.data, config);
    CHECK(result.objective.value() >= 0.99);
    CHECK(result.b_hat.canonical);
    CHECK(ordreg::is_canonical(result.b_hat.B));
    CHECK(!result.penalized_value.has_value());
    // Winner ties go to the lowest restart index.
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& r : result.restarts) {
        if (!r.degenerate) {
            best = std::max(best, r.final_penalized);
        }
    }
    for (const auto& r : result.restarts) {
        if (!r.degenerate && r.final_penalized == best) {
            CHECK(result.restart_index == r.index);
            break;
        }
    }
}

TEST_CASE("fit: deterministic, and identical across thread counts") {
    const auto data = noisy_dataset(40, 3, 4, 90);
    solver::FitConfig config;
    config.restarts = 6;
    config.seed = 23;

    const auto first = solver::fit(data, config);
    const auto second = solver::fit(data, config);
    CHECK(same_fit(first, second));

    solver::FitConfig threaded = config;
    threaded.threads = 4;
    const auto parallel = solver::fit(data, threaded);
    CHECK(same_fit(first, parallel));

    solver::FitConfig hardware = config;
    hardware.threads = 0;
    const auto detected = solver::fit(data, hardware);
    CHECK(same_fit(first, detected));
}

TEST_CASE("fit: trace and stopping bookkeeping") {
    const auto data = noisy_dataset(32, 2, 4, 55);
    solver::FitConfig config;
    config.restarts = 4;
    config.seed = 8;
    config.max_sweeps = 50;
    const auto result = solver::fit(data, config);

    CHECK(result.trace.size() == static_cast<std::size_t>(result.sweeps_used));
    for (std::size_t i = 1; i < result.trace.size(); ++i) {
        CHECK(result.trace[i] >= result.trace[i - 1]);
    }
    for (const auto& r : result.restarts) {
        CHECK(!r.degenerate);
        CHECK(r.stopped_by_rule);
        CHECK(r.sweeps < config.max_sweeps);
    }
    CHECK(result.objective.concordant_count ==
          ordreg::concordance_objective(data, result.b_hat).concordant_count);

    SUBCASE("sweep cap is respected") {
        solver::FitConfig capped = config;
        capped.max_sweeps = 1;
        const auto short_run = solver::fit(data, capped);
        CHECK(short_run.sweeps_used == 1);
        for (const auto& r : short_run.restarts) {
            CHECK(r.sweeps == 1);
        }
    }
}

TEST_CASE("fit: configuration validation") {
    const auto data = noisy_dataset(10, 2, 3, 3);
    solver::FitConfig config;
    config.restarts = 0;
    CHECK_THROWS_AS(solver::fit(data, config), ordreg::Error);
    config = {};
    config.max_sweeps = 0;
    CHECK_THROWS_AS(solver::fit(data, config), ordreg::Error);
    config = {};
    config.lambda = -0.5;
    CHECK_THROWS_AS(solver::fit(data, config), ordreg::Error);
    config = {};
    config.threads = -1;
    CHECK_THROWS_AS(solver::fit(data, config), ordreg::Error);
}

namespace {

// Records the exact running counts the solver reports, to check that
// every coordinate move is monotone and that canonicalization at the end
// of a sweep leaves the recount unchanged.
struct Recorder : solver::CoordinateObserver {
    std::int64_t last = -1;
    int coordinate_calls = 0;
    int sweep_calls = 0;
    int monotone_violations = 0;
    int neutrality_violations = 0;

    void after_coordinate(int, int, Index, Index, const Matrix&,
                          std::int64_t count) override {
        if (last >= 0 && count < last) {
            ++monotone_violations;
        }
        last = count;
        ++coordinate_calls;
    }
    void after_sweep(int, int, const Matrix&, std::int64_t count) override {
        if (count != last) {
            ++neutrality_violations;
        }
        last = count;
        ++sweep_calls;
    }
};

} // namespace

TEST_CASE("fit: per-coordinate counts rise and survive canonicalization") {
    for (std::uint64_t seed = 60; seed < 64; ++seed) {
        const auto data = noisy_dataset(24, 2, 3, seed);
        solver::FitConfig config;
        config.restarts = 1;
        config.seed = seed;
        Recorder recorder;
        const auto result = solver::fit(data, config, &recorder);

        CHECK(recorder.monotone_violations == 0);
        CHECK(recorder.neutrality_violations == 0);
        CHECK(recorder.sweep_calls == result.sweeps_used);
        CHECK(recorder.coordinate_calls == result.sweeps_used * 2 * 3);
    }
}

TEST_CASE("fit: penalized runs report the penalized objective") {
    const auto toy = noiseless_case(48, 4, 3, 13);
    solver::FitConfig config;
    config.restarts = 4;
    config.seed = 29;
    config.lambda = 2.0;
    const auto result = solver::fit(toy.data, config);

    REQUIRE(result.penalized_value.has_value());
    std::int64_t nnz = 0;
    for (Index r = 0; r < result.b_hat.B.rows(); ++r) {
        for (Index s = 0; s < result.b_hat.B.cols(); ++s) {
            nnz += (result.b_hat.B(r, s) != 0.0) ? 1 : 0;
        }
    }
    const double expected =
        (static_cast<double>(result.objective.concordant_count) -
         config.lambda * static_cast<double>(nnz)) /
        static_cast<double>(result.objective.normalizer);
    CHECK(*result.penalized_value == expected);

    // Non-decreasing up to the stopping dip allowed for penalized runs.
    for (std::size_t i = 1; i + 1 < result.trace.size(); ++i) {
        CHECK(result.trace[i] >= result.trace[i - 1]);
    }

    SUBCASE("a penalty nothing can pay degenerates every restart") {
        solver::FitConfig harsh = config;
        harsh.lambda = 1e9;
        CHECK_THROWS_AS(solver::fit(toy.data, harsh),
                        ordreg::AllRestartsDegenerate);
    }
}

TEST_CASE("predict: scores rows against the fitted matrix") {
    const auto toy = noiseless_case(20, 3, 4, 19);
    solver::FitConfig config;
    config.restarts = 2;
    config.seed = 7;
    const auto result = solver::fit(toy.data, config);

    ordreg::rng::Generator gen(91);
    const Matrix fresh = random_matrix(6, 3, gen);
    const Matrix scores = solver::predict(result.b_hat, fresh);
    REQUIRE(scores.rows() == 6);
    REQUIRE(scores.cols() == 4);
    for (Index i = 0; i < fresh.rows(); ++i) {
        const ordreg::Vector row = fresh.row(i).transpose();
        const auto expected = ordreg::row_ordering(row, result.b_hat);
        for (Index j = 0; j < 4; ++j) {
            CHECK(scores(i, j) == expected(j));
        }
    }
    CHECK_THROWS_AS(solver::predict(result.b_hat, random_matrix(2, 5, gen)),
                    ordreg::DimensionMismatch);
}

TEST_CASE("cross_validate_lambda: scores candidates on held-out rows") {
    const auto toy = noiseless_case(40, 2, 3, 101);
    solver::FitConfig config;
    config.restarts = 3;
    config.seed = 31;

    SUBCASE("single candidate wins by default") {
        const double grid[] = {0.0};
        const auto cv =
            solver::cross_validate_lambda(toy.data, grid, 4, config);
        CHECK(cv.best_lambda == 0.0);
        REQUIRE(cv.scores.size() == 1);
        CHECK(!cv.scores[0].failed);
        CHECK(cv.scores[0].mean_kendall <= 1.0);
        CHECK(cv.scores[0].mean_kendall >= -1.0);
    }
    SUBCASE("failing candidates are disqualified") {
        const double grid[] = {0.0, 1e9};
        const auto cv =
            solver::cross_validate_lambda(toy.data, grid, 4, config);
        CHECK(cv.best_lambda == 0.0);
        REQUIRE(cv.scores.size() == 2);
        CHECK(!cv.scores[0].failed);
        CHECK(cv.scores[1].failed);
        CHECK(cv.scores[1].mean_kendall ==
              -std::numeric_limits<double>::infinity());
    }
    SUBCASE("exact ties go to the smaller lambda") {
        const double grid[] = {0.5, 0.0};
        const auto cv =
            solver::cross_validate_lambda(toy.data, grid, 4, config);
        REQUIRE(cv.scores.size() == 2);
        if (cv.scores[0].mean_kendall == cv.scores[1].mean_kendall) {
            CHECK(cv.best_lambda == 0.0);
        } else if (cv.scores[0].mean_kendall > cv.scores[1].mean_kendall) {
            CHECK(cv.best_lambda == 0.5);
        } else {
            CHECK(cv.best_lambda == 0.0);
        }
    }
    SUBCASE("deterministic") {
        const double grid[] = {0.0, 2.0};
        const auto a = solver::cross_validate_lambda(toy.data, grid, 5, config);
        const auto b = solver::cross_validate_lambda(toy.data, grid, 5, config);
        CHECK(a.best_lambda == b.best_lambda);
        REQUIRE(a.scores.size() == b.scores.size());
        for (std::size_t i = 0; i < a.scores.size(); ++i) {
            CHECK(a.scores[i].lambda == b.scores[i].lambda);
            CHECK(a.scores[i].mean_kendall == b.scores[i].mean_kendall);
            CHECK(a.scores[i].failed == b.scores[i].failed);
        }
    }
    SUBCASE("argument validation") {
        const double grid[] = {0.0};
        CHECK_THROWS_AS(
            solver::cross_validate_lambda(toy.data, grid, 1, config),
            ordreg::InsufficientData);
        CHECK_THROWS_AS(
            solver::cross_validate_lambda(toy.data, grid, 41, config),
            ordreg::InsufficientData);
        CHECK_THROWS_AS(solver::cross_validate_lambda(
                            toy.data, std::span<const double>{}, 4, config),
                        ordreg::InsufficientData);
        const double bad[] = {-1.0};
        CHECK_THROWS_AS(solver::cross_validate_lambda(toy.data, bad, 4, config),
                        ordreg::Error);
    }
}

TEST_CASE("fit: recovers structure on a generated benchmark instance") {
    ordreg::synth::ExperimentConfig scenario;
    scenario.p = 5;
    scenario.q = 5;
    scenario.density = 0.75;
    scenario.noise = ordreg::synth::NoiseKind::E1;
    scenario.utility = ordreg::synth::UtilityKind::U2;
    const auto instance = ordreg::synth::gen_dataset(scenario, 128, 424242);

    solver::FitConfig config;
    config.restarts = 4;
    config.seed = instance.fit_seed;
    const auto result = solver::fit(instance.data, config);

    CHECK(result.objective.value() > 0.8);
    CHECK(ordreg::synth::metric_m2(result.b_hat.B, instance.b_star.B) > 0.7);
    CHECK(ordreg::synth::metric_m1(result.b_hat.B, instance.b_star.B) < 0.5);
}
