#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <vector>

#include "ordreg/rng.hpp"
#include "ordreg/stepmax.hpp"

namespace sm = ordreg::stepmax;

namespace {

sm::StepSumProblem problem(std::vector<double> u, std::vector<double> v) {
    return sm::StepSumProblem{std::move(u), std::move(v)};
}

// Random instance with the hostile shapes the solver must survive:
// duplicated breakpoints, v = 0 terms, all-negative v, mixed scales.
sm::StepSumProblem random_problem(ordreg::rng::Generator& gen,
                                  std::size_t max_terms) {
    const auto t = static_cast<std::size_t>(1 + gen.below(max_terms));
    sm::StepSumProblem prob;
    prob.u.resize(t);
    prob.v.resize(t);
    const double scale =
        std::pow(10.0, static_cast<double>(gen.below(7)) - 3.0);
    for (std::size_t i = 0; i < t; ++i) {
        prob.u[i] = gen.normal() * scale;
        prob.v[i] = gen.normal() * scale;
    }
    if (gen.uniform01() < 0.3) {
        for (std::size_t i = 0; i < t; ++i) {
            if (gen.uniform01() < 0.25) {
                prob.v[i] = 0.0;
            }
        }
    }
    if (gen.uniform01() < 0.1) {
        for (auto& v : prob.v) {
            v = -std::abs(v);
        }
    }
    if (gen.uniform01() < 0.35) {
        // Power-of-two rescaling is exact, so the copies break at
        // bit-identical points and must coalesce.
        const auto copies = 1 + gen.below(4);
        for (std::uint64_t c = 0; c < copies; ++c) {
            const auto idx = static_cast<std::size_t>(gen.below(t));
            prob.u.push_back(prob.u[idx] * 2.0);
            prob.v.push_back(prob.v[idx] * 2.0);
        }
    }
    return prob;
}

} // namespace

TEST_CASE("evaluate_step_sum: direct indicator count") {
    const auto prob = problem({-2.0, 0.0, 1.0}, {1.0, 1.0, 0.0});
    CHECK(sm::evaluate_step_sum(prob, 0.0) == 1);
    CHECK(sm::evaluate_step_sum(prob, 1.0) == 2);
    CHECK(sm::evaluate_step_sum(prob, 3.0) == 3);
    CHECK_THROWS_AS(
        sm::evaluate_step_sum(prob, std::numeric_limits<double>::infinity()),
        ordreg::NonFinite);
}

TEST_CASE("maximize_step_sum: single upward step") {
    const auto sol = sm::maximize_step_sum(problem({-2.0}, {1.0}));
    CHECK(sol.value == 1);
    CHECK(sol.x_hat == 3.0);
}

TEST_CASE("maximize_step_sum: bounded interior maximum") {
    // 1(x > 0) + 1(x < 2): both hold on (0, 2), witness is the midpoint.
    const auto sol = sm::maximize_step_sum(problem({0.0, 2.0}, {1.0, -1.0}));
    CHECK(sol.value == 2);
    CHECK(sol.x_hat == 1.0);
}

TEST_CASE("maximize_step_sum: maximum on the unbounded right interval") {
    // 1(x > -1) + 1(x > 1): both hold past the largest breakpoint.
    const auto sol = sm::maximize_step_sum(problem({1.0, -1.0}, {1.0, 1.0}));
    CHECK(sol.value == 2);
    CHECK(sol.x_hat == 2.0);
}

TEST_CASE("maximize_step_sum: no terms gives zero at the origin") {
    const auto sol = sm::maximize_step_sum(problem({}, {}));
    CHECK(sol.value == 0);
    CHECK(sol.x_hat == 0.0);
}

TEST_CASE("maximize_step_sum: constant terms join the base count") {
    SUBCASE("all v zero") {
        const auto sol =
            sm::maximize_step_sum(problem({1.0, -1.0, 3.0}, {0.0, 0.0, 0.0}));
        CHECK(sol.value == 2);
        CHECK(sol.x_hat == 0.0);
    }
    SUBCASE("breakpoint beyond double range acts as a constant") {
        CHECK(sm::maximize_step_sum(problem({1e308}, {1e-100})).value == 1);
        CHECK(sm::maximize_step_sum(problem({-1e308}, {1e-100})).value == 0);
    }
}

TEST_CASE("maximize_step_sum: equal breakpoints coalesce before comparing") {
    // Two steps up and one down at x = 1; the net +1 applies at once, so
    // the zero-width split never shows up as a separate interval.
    const auto sol =
        sm::maximize_step_sum(problem({-1.0, -1.0, 1.0}, {1.0, 1.0, -1.0}));
    CHECK(sol.value == 2);
    CHECK(sol.x_hat == 2.0);
    CHECK(sm::evaluate_step_sum(problem({-1.0, -1.0, 1.0}, {1.0, 1.0, -1.0}),
                                sol.x_hat) == 2);
}

TEST_CASE("maximize_step_sum: leftmost maximal interval wins ties") {
    // 1(x < 0) + 1(x > 1): count 1 on both unbounded sides; the left side
    // is reported, one unit below the smallest breakpoint.
    const auto sol = sm::maximize_step_sum(problem({0.0, -1.0}, {-1.0, 1.0}));
    CHECK(sol.value == 1);
    CHECK(sol.x_hat == -1.0);
}

TEST_CASE("maximize_step_sum: witness midpoint cannot overflow") {
    const auto sol =
        sm::maximize_step_sum(problem({1e308, 1e308}, {1.0, -1.0}));
    CHECK(sol.value == 2);
    CHECK(sol.x_hat == 0.0);
}

TEST_CASE("maximize_step_sum: input validation") {
    CHECK_THROWS_AS(sm::maximize_step_sum(problem({1.0}, {1.0, 2.0})),
                    ordreg::DimensionMismatch);
    CHECK_THROWS_AS(sm::maximize_step_sum(problem({std::nan("")}, {1.0})),
                    ordreg::NonFinite);
}

TEST_CASE("maximize_step_sum: agrees with the brute-force oracle") {
    ordreg::rng::Generator gen(2024);
    sm::Workspace ws;
    for (int trial = 0; trial < 300; ++trial) {
        const auto prob = random_problem(gen, 60);
        const auto fast = sm::maximize_step_sum(prob.u, prob.v, ws);
        const auto slow = sm::brute_force_step_sum(prob);
        REQUIRE(fast.value == slow.value);
        // The witness must achieve the reported value exactly.
        REQUIRE(sm::evaluate_step_sum(prob, fast.x_hat) == fast.value);
        // The struct overload shares the workspace path.
        const auto again = sm::maximize_step_sum(prob);
        REQUIRE(again.value == fast.value);
        REQUIRE(again.x_hat == fast.x_hat);
    }
}

TEST_CASE("maximize_step_sum_l0: compare-with-zero rule") {
    SUBCASE("penalty larger than the gain keeps zero") {
        const auto sol = sm::maximize_step_sum_l0(problem({-2.0}, {1.0}), 2.0);
        CHECK(sol.x_hat == 0.0);
        CHECK(sol.value == 0.0);
    }
    SUBCASE("penalty smaller than the gain keeps the maximizer") {
        const auto sol =
            sm::maximize_step_sum_l0(problem({0.0, 2.0}, {1.0, -1.0}), 0.5);
        CHECK(sol.x_hat == 1.0);
        CHECK(sol.value == 1.5);
    }
    SUBCASE("exact tie prefers zero") {
        // max off origin is 1 at x > 2; f(0) = 0; lambda = 1 ties.
        const auto sol = sm::maximize_step_sum_l0(problem({-2.0}, {1.0}), 1.0);
        CHECK(sol.x_hat == 0.0);
        CHECK(sol.value == 0.0);
    }
    SUBCASE("negative or NaN lambda rejected") {
        CHECK_THROWS_AS(sm::maximize_step_sum_l0(problem({1.0}, {1.0}), -0.5),
                        ordreg::Error);
        CHECK_THROWS_AS(
            sm::maximize_step_sum_l0(problem({1.0}, {1.0}), std::nan("")),
            ordreg::Error);
    }
}

TEST_CASE("maximize_step_sum_l0: dominance properties on random instances") {
    ordreg::rng::Generator gen(515);
    const double lambdas[] = {0.0, 0.5, 1.0, 3.0};
    for (int trial = 0; trial < 200; ++trial) {
        const auto prob = random_problem(gen, 40);
        const auto un = sm::maximize_step_sum(prob);
        const auto at_zero =
            static_cast<double>(sm::evaluate_step_sum(prob, 0.0));
        for (const double lambda : lambdas) {
            const auto sol = sm::maximize_step_sum_l0(prob, lambda);
            // Reported value is consistent with direct evaluation.
            const double direct =
                static_cast<double>(sm::evaluate_step_sum(prob, sol.x_hat)) -
                lambda * (sol.x_hat != 0.0 ? 1.0 : 0.0);
            REQUIRE(sol.value == direct);
            // Dominates both candidate points and never beats the
            // unpenalized optimum.
            REQUIRE(sol.value >= at_zero);
            REQUIRE(sol.value >= static_cast<double>(un.value) - lambda);
            REQUIRE(sol.value <= static_cast<double>(un.value));
            // Ties go to the sparse answer.
            if (at_zero >= static_cast<double>(un.value) - lambda) {
                REQUIRE(sol.x_hat == 0.0);
            }
            if (lambda == 0.0) {
                REQUIRE(sol.value == static_cast<double>(un.value));
            }
        }
    }
}

TEST_CASE("brute_force_step_sum: refuses oversized instances") {
    sm::StepSumProblem prob;
    prob.u.assign(10001, 0.0);
    prob.v.assign(10001, 0.0);
    CHECK_THROWS_AS(sm::brute_force_step_sum(prob), ordreg::ProblemTooLarge);
}

TEST_CASE("maximize_step_sum: doubling T scales like a sort, not a sweep") {
    auto median_time = [](std::size_t t, std::uint64_t seed) {
        ordreg::rng::Generator gen(seed);
        std::vector<double> u(t);
        std::vector<double> v(t);
        for (std::size_t i = 0; i < t; ++i) {
            u[i] = gen.normal();
            v[i] = gen.normal();
        }
        sm::Workspace ws;
        ws.events.reserve(t);
        sm::maximize_step_sum(u, v, ws); // warm-up
        std::vector<double> times;
        for (int rep = 0; rep < 11; ++rep) {
            const auto start = std::chrono::steady_clock::now();
            const auto sol = sm::maximize_step_sum(u, v, ws);
            const auto stop = std::chrono::steady_clock::now();
            REQUIRE(sol.value > 0);
            times.push_back(std::chrono::duration<double>(stop - start).count());
        }
        std::nth_element(times.begin(), times.begin() + times.size() / 2,
                         times.end());
        return times[times.size() / 2];
    };
    const double small = median_time(std::size_t{1} << 14, 21);
    const double large = median_time(std::size_t{1} << 15, 22);
    REQUIRE(small > 0.0);
    CHECK(large / small <= 2.5);
}
