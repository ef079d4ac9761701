#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>

#include "ordreg/errors.hpp"

namespace ordreg {

// Row-major storage: the hot loops walk response rows pairwise.
using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Scores for one covariate row; the induced ordering is the prediction.
using RankVector = Vector;

// Covariates X (n x p) paired with responses Y (n x q).
//
// Only the order of the entries within each row of Y carries information:
// the model is Y = U(X B + E) with U an unknown strictly increasing
// transform applied entrywise, so any fitting criterion defined on this
// pair must be invariant to monotone relabelling of Y.
struct DataSet {
    Matrix X;
    Matrix Y;

    // Validates shape (rows match, p >= 1, q >= 2) and finiteness.
    static DataSet create(Matrix x, Matrix y);

    Index n() const { return X.rows(); }
    Index p() const { return X.cols(); }
    Index q() const { return Y.cols(); }
};

// A p x q coefficient matrix. `canonical` records that the matrix has
// passed through canonicalize(): last column zero, unit Frobenius norm.
struct CoefficientMatrix {
    Matrix B;
    bool canonical = false;
};

// Exact value of the concordance objective: the integer number of
// satisfied response pairs plus the fixed normaliser n * q * (q - 1) / 2.
// Stored this way so equality of objective values is exact and the
// monotone-ascent property of the solver can be asserted without
// tolerances.
struct ObjectiveValue {
    std::int64_t concordant_count = 0;
    std::int64_t normalizer = 0;

    double value() const {
        return static_cast<double>(concordant_count) /
               static_cast<double>(normalizer);
    }
};

// Pairs (j, k), j < k, within one row, over n rows: n * q * (q - 1) / 2.
std::int64_t pair_normalizer(Index n, Index q);

// Counts pairs (i; j < k) with Y(i,j) != Y(i,k) whose order is matched
// strictly by scores(i,j) vs scores(i,k). Ties in Y exclude the pair from
// the count; ties in scores never count as matched.
std::int64_t concordant_pair_count(const Matrix& Y, const Matrix& scores);

// The rank-concordance objective of B on the data, using scores X * B.
ObjectiveValue concordance_objective(const DataSet& data, const Matrix& B);
ObjectiveValue concordance_objective(const DataSet& data,
                                     const CoefficientMatrix& B);

// Canonical representative of the equivalence class
// { c * B + beta * 1^T : c > 0, beta in R^p }:
// subtract the last column from every column, divide by the Frobenius
// norm of the result. Throws DegenerateMatrix when that norm is below
// 1e-12 (B was within numerical noise of the class of constant-score
// matrices, on which the objective is flat).
CoefficientMatrix canonicalize(const Matrix& B);

// True when the last column is exactly zero and the Frobenius norm is
// within `tol` of one.
bool is_canonical(const Matrix& B, double tol = 1e-12);

// Kendall rank correlation, tau-a convention:
// (concordant - discordant) / (m * (m - 1) / 2). Pairs tied in either
// input count in neither term but stay in the denominator, so the result
// with ties lies strictly inside (-1, 1). Requires m >= 2.
double kendall_tau(std::span<const double> a, std::span<const double> b);

// Mean of kendall_tau over corresponding rows. Shapes must match.
double average_row_kendall(const Matrix& predicted, const Matrix& truth);

// Scores B^T x for one covariate vector; sorting items by descending
// score gives the predicted preference ordering.
RankVector row_ordering(const Vector& x, const CoefficientMatrix& B);

} // namespace ordreg
