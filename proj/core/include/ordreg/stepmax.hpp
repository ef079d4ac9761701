#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "ordreg/errors.hpp"

namespace ordreg::stepmax {

// The one-dimensional subproblem: maximize x -> sum_t 1(u_t + v_t * x > 0).
// Terms with v_t = 0 are constants: u_t > 0 contributes 1 everywhere,
// otherwise 0.
struct StepSumProblem {
    std::vector<double> u;
    std::vector<double> v;

    std::size_t size() const { return u.size(); }
};

// Maximizer witness and the exact count of active indicators there.
struct StepSumSolution {
    double x_hat = 0.0;
    std::int64_t value = 0;
};

// Result of the L0-penalized variant; the value is
// count(x_hat) - lambda * 1(x_hat != 0) and so a real, not a count.
struct PenalizedSolution {
    double x_hat = 0.0;
    double value = 0.0;
};

// Direct evaluation of the step sum at x.
std::int64_t evaluate_step_sum(const StepSumProblem& prob, double x);

// Reusable event buffer so the solver's inner loop does not allocate per
// coordinate. One workspace per thread.
struct Workspace {
    std::vector<std::pair<double, std::int32_t>> events;
};

// Exact global maximizer of the step sum in O(T log T): sort the
// breakpoints r_t = -u_t / v_t, sweep left to right accumulating +1 for
// each upward step (v_t > 0) and -1 for each downward step, and track the
// running count. Conventions:
//   - x_hat is the midpoint of the chosen bounded interval, the smallest
//     breakpoint minus 1 when the interval is unbounded below, or the
//     largest breakpoint plus 1 when unbounded above;
//   - equal breakpoints are coalesced: every delta at that point applies
//     before the running count is compared to the maximum (no zero-width
//     intervals);
//   - among equally maximal intervals the leftmost wins (strict >);
//   - v_t = 0 terms join a base count instead of the sweep, as does any
//     term whose ratio -u_t / v_t is not finite (its step lies beyond
//     representable x, so it is constant over the reals we can return);
//   - no breakpoints at all gives x_hat = 0 and the base count.
StepSumSolution maximize_step_sum(std::span<const double> u,
                                  std::span<const double> v, Workspace& ws);
StepSumSolution maximize_step_sum(const StepSumProblem& prob);

// Maximizes f(x) = sum_t 1(u_t + v_t * x > 0) - lambda * 1(x != 0) for
// lambda >= 0: solves the unpenalized problem, then compares f at that
// x_hat against f(0) by direct evaluation and keeps 0 unless x_hat is
// strictly better (ties prefer the sparse answer).
PenalizedSolution maximize_step_sum_l0(const StepSumProblem& prob,
                                       double lambda);

// Test oracle: evaluates the sum at a point below every breakpoint, at
// the midpoint of every pair of consecutive distinct breakpoints, and at
// a point above every breakpoint; keeps the leftmost maximum. O(T^2);
// refuses T > 10000 with ProblemTooLarge.
StepSumSolution brute_force_step_sum(const StepSumProblem& prob);

} // namespace ordreg::stepmax
