#include "ranks.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace ordreg::cli {

Matrix score_ranks(const Matrix& scores) {
    Matrix ranks(scores.rows(), scores.cols());
    const Index q = scores.cols();
    for (Index i = 0; i < scores.rows(); ++i) {
        for (Index j = 0; j < q; ++j) {
            Index greater = 0;
            for (Index k = 0; k < q; ++k) {
                greater += (scores(i, k) > scores(i, j)) ? 1 : 0;
            }
            ranks(i, j) = static_cast<double>(1 + greater);
        }
    }
    return ranks;
}

Matrix ordering_to_ratings(const Matrix& orderings) {
    const Index q = orderings.cols();
    if (q < 2) {
        throw DimensionMismatch("orderings need at least two items per row");
    }
    Matrix ratings(orderings.rows(), q);
    std::vector<int> seen(static_cast<std::size_t>(q));
    for (Index i = 0; i < orderings.rows(); ++i) {
        std::fill(seen.begin(), seen.end(), 0);
        for (Index j = 0; j < q; ++j) {
            const double raw = orderings(i, j);
            const double rounded = std::floor(raw);
            if (raw != rounded || raw < 1.0 ||
                raw > static_cast<double>(q)) {
                throw NotAPermutation(
                    "row " + std::to_string(i + 1) + ", item " +
                    std::to_string(j + 1) + ": rank " +
                    std::to_string(raw) + " is not an integer in 1.." +
                    std::to_string(q));
            }
            const auto rank = static_cast<std::size_t>(raw) - 1;
            if (seen[rank] != 0) {
                throw NotAPermutation("row " + std::to_string(i + 1) +
                                      ": rank " +
                                      std::to_string(rank + 1) +
                                      " appears more than once");
            }
            seen[rank] = 1;
            ratings(i, j) = (static_cast<double>(q) - raw + 1.0) /
                            (static_cast<double>(q) + 1.0);
        }
    }
    return ratings;
}

} // namespace ordreg::cli
