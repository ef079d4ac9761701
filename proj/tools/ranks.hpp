#pragma once

#include "ordreg/core.hpp"

namespace ordreg::cli {

// Within-row competition ranks of scores: 1 = largest; a tied block
// shares the smallest rank of the block (rank_j = 1 + #{k: s_k > s_j}).
Matrix score_ranks(const Matrix& scores);

// Preference orderings (each row a permutation of 1..q, 1 = most
// preferred) to the rating scale (q - rank + 1) / (q + 1), so the most
// preferred item gets q/(q+1) and the least preferred 1/(q+1).
// NotAPermutation when a row is not a permutation of 1..q.
Matrix ordering_to_ratings(const Matrix& orderings);

} // namespace ordreg::cli
