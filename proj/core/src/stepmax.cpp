#include "ordreg/stepmax.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ordreg::stepmax {

namespace {

void check_problem(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) {
        throw DimensionMismatch("step-sum problem has " +
                                std::to_string(u.size()) + " u terms but " +
                                std::to_string(v.size()) + " v terms");
    }
    for (std::size_t t = 0; t < u.size(); ++t) {
        if (!std::isfinite(u[t]) || !std::isfinite(v[t])) {
            throw NonFinite("step-sum coefficients contain NaN or infinity");
        }
    }
}

// Overflow-safe interior point of (a, b): halving first cannot overflow,
// and for a < b the result stays inside the open interval except when a
// and b are adjacent doubles, a spacing the continuous inputs here do not
// produce.
double midpoint(double a, double b) { return a / 2 + b / 2; }

// A point strictly below r: r - 1 by convention, one ulp down when the
// magnitude of r is so large that subtracting 1 rounds back to r.
double just_below(double r) {
    const double x = r - 1.0;
    return x < r ? x : std::nextafter(r, -HUGE_VAL);
}

// Mirror of just_below.
double just_above(double r) {
    const double x = r + 1.0;
    return x > r ? x : std::nextafter(r, HUGE_VAL);
}

} // namespace

std::int64_t evaluate_step_sum(const StepSumProblem& prob, double x) {
    check_problem(prob.u, prob.v);
    if (!std::isfinite(x)) {
        throw NonFinite("evaluation point must be finite");
    }
    std::int64_t count = 0;
    for (std::size_t t = 0; t < prob.u.size(); ++t) {
        count += (prob.u[t] + prob.v[t] * x > 0.0) ? 1 : 0;
    }
    return count;
}

StepSumSolution maximize_step_sum(std::span<const double> u,
                                  std::span<const double> v, Workspace& ws) {
    check_problem(u, v);
    std::int64_t base = 0;
    auto& events = ws.events;
    events.clear();
    for (std::size_t t = 0; t < u.size(); ++t) {
        if (v[t] == 0.0) {
            base += (u[t] > 0.0) ? 1 : 0;
            continue;
        }
        const double r = -u[t] / v[t];
        if (!std::isfinite(r)) {
            // Breakpoint beyond double range: constant over every
            // representable x, active exactly when u_t wins.
            base += (u[t] > 0.0) ? 1 : 0;
            continue;
        }
        events.emplace_back(r, v[t] > 0.0 ? 1 : -1);
    }
    if (events.empty()) {
        return StepSumSolution{0.0, base};
    }
    std::sort(events.begin(), events.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    // Left of every breakpoint only the downward steps (v_t < 0) are on.
    std::int64_t running = base;
    for (const auto& e : events) {
        running += (e.second < 0) ? 1 : 0;
    }
    std::int64_t best = running;
    double best_x = just_below(events.front().first);

    const std::size_t total = events.size();
    std::size_t i = 0;
    while (i < total) {
        const double r = events[i].first;
        std::int64_t delta = 0;
        std::size_t j = i;
        while (j < total && events[j].first == r) {
            delta += events[j].second;
            ++j;
        }
        running += delta;
        if (running > best) {
            best = running;
            best_x =
                (j == total) ? just_above(r) : midpoint(r, events[j].first);
        }
        i = j;
    }
    return StepSumSolution{best_x, best};
}

StepSumSolution maximize_step_sum(const StepSumProblem& prob) {
    Workspace ws;
    return maximize_step_sum(prob.u, prob.v, ws);
}

PenalizedSolution maximize_step_sum_l0(const StepSumProblem& prob,
                                       double lambda) {
    if (!(lambda >= 0.0)) {
        throw Error("lambda must be a non-negative real");
    }
    const StepSumSolution unpenalized = maximize_step_sum(prob);
    const auto at_zero =
        static_cast<double>(evaluate_step_sum(prob, 0.0));
    if (unpenalized.x_hat == 0.0) {
        return PenalizedSolution{0.0, at_zero};
    }
    const double at_hat = static_cast<double>(unpenalized.value) - lambda;
    if (at_hat > at_zero) {
        return PenalizedSolution{unpenalized.x_hat, at_hat};
    }
    return PenalizedSolution{0.0, at_zero};
}

StepSumSolution brute_force_step_sum(const StepSumProblem& prob) {
    check_problem(prob.u, prob.v);
    if (prob.size() > 10000) {
        throw ProblemTooLarge("brute-force oracle accepts T <= 10000, got " +
                              std::to_string(prob.size()));
    }
    std::vector<double> points;
    points.reserve(prob.size());
    for (std::size_t t = 0; t < prob.size(); ++t) {
        if (prob.v[t] == 0.0) {
            continue;
        }
        const double r = -prob.u[t] / prob.v[t];
        if (std::isfinite(r)) {
            points.push_back(r);
        }
    }
    if (points.empty()) {
        return StepSumSolution{0.0, evaluate_step_sum(prob, 0.0)};
    }
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());

    std::vector<double> candidates;
    candidates.reserve(points.size() + 1);
    candidates.push_back(just_below(points.front()));
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        candidates.push_back(midpoint(points[i], points[i + 1]));
    }
    candidates.push_back(just_above(points.back()));

    std::int64_t best = -1;
    double best_x = 0.0;
    for (const double c : candidates) {
        const std::int64_t value = evaluate_step_sum(prob, c);
        if (value > best) {
            best = value;
            best_x = c;
        }
    }
    return StepSumSolution{best_x, best};
}

} // namespace ordreg::stepmax
