#include "ordreg/core.hpp"

#include <cmath>
#include <string>

namespace ordreg {

namespace {

std::string shape(const Matrix& m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

} // namespace

DataSet DataSet::create(Matrix x, Matrix y) {
    if (x.rows() != y.rows()) {
        throw DimensionMismatch("X has " + std::to_string(x.rows()) +
                                " rows but Y has " + std::to_string(y.rows()));
    }
    if (x.rows() < 1) {
        throw DimensionMismatch("data set needs at least one observation");
    }
    if (x.cols() < 1) {
        throw DimensionMismatch("X needs at least one covariate column");
    }
    if (y.cols() < 2) {
        throw DimensionMismatch(
            "Y needs at least two response columns to form pairs");
    }
    if (!x.allFinite()) {
        throw NonFinite("X contains NaN or infinity");
    }
    if (!y.allFinite()) {
        throw NonFinite("Y contains NaN or infinity");
    }
    return DataSet{std::move(x), std::move(y)};
}

std::int64_t pair_normalizer(Index n, Index q) {
    return static_cast<std::int64_t>(n) * static_cast<std::int64_t>(q) *
           static_cast<std::int64_t>(q - 1) / 2;
}

std::int64_t concordant_pair_count(const Matrix& Y, const Matrix& scores) {
    if (Y.rows() != scores.rows() || Y.cols() != scores.cols()) {
        throw DimensionMismatch("Y is " + shape(Y) + " but scores are " +
                                shape(scores));
    }
    const Index n = Y.rows();
    const Index q = Y.cols();
    std::int64_t count = 0;
    for (Index i = 0; i < n; ++i) {
        const double* y = Y.row(i).data();
        const double* s = scores.row(i).data();
        for (Index j = 0; j + 1 < q; ++j) {
            for (Index k = j + 1; k < q; ++k) {
                if (y[j] > y[k]) {
                    count += (s[j] > s[k]) ? 1 : 0;
                } else if (y[j] < y[k]) {
                    count += (s[j] < s[k]) ? 1 : 0;
                }
            }
        }
    }
    return count;
}

ObjectiveValue concordance_objective(const DataSet& data, const Matrix& B) {
    if (B.rows() != data.p() || B.cols() != data.q()) {
        throw DimensionMismatch("coefficients are " + shape(B) +
                                " but data needs " + std::to_string(data.p()) +
                                "x" + std::to_string(data.q()));
    }
    if (!B.allFinite()) {
        throw NonFinite("coefficient matrix contains NaN or infinity");
    }
    const Matrix scores = data.X * B;
    return ObjectiveValue{concordant_pair_count(data.Y, scores),
                          pair_normalizer(data.n(), data.q())};
}

ObjectiveValue concordance_objective(const DataSet& data,
                                     const CoefficientMatrix& B) {
    return concordance_objective(data, B.B);
}

CoefficientMatrix canonicalize(const Matrix& B) {
    if (B.rows() < 1 || B.cols() < 2) {
        throw DimensionMismatch("canonical form needs p >= 1, q >= 2");
    }
    if (!B.allFinite()) {
        throw NonFinite("coefficient matrix contains NaN or infinity");
    }
    const Vector last = B.col(B.cols() - 1);
    Matrix shifted = B;
    shifted.colwise() -= last;
    const double norm = shifted.norm();
    if (norm < 1e-12) {
        throw DegenerateMatrix(
            "matrix is constant across responses (norm " +
            std::to_string(norm) + " after shift); scores carry no order");
    }
    shifted /= norm;
    return CoefficientMatrix{std::move(shifted), true};
}

bool is_canonical(const Matrix& B, double tol) {
    if (B.rows() < 1 || B.cols() < 1) {
        return false;
    }
    if ((B.col(B.cols() - 1).array() != 0.0).any()) {
        return false;
    }
    return std::abs(B.norm() - 1.0) <= tol;
}

double kendall_tau(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw DimensionMismatch("sequences have lengths " +
                                std::to_string(a.size()) + " and " +
                                std::to_string(b.size()));
    }
    const std::size_t m = a.size();
    if (m < 2) {
        throw DimensionMismatch("kendall_tau needs at least two items");
    }
    for (std::size_t i = 0; i < m; ++i) {
        if (!std::isfinite(a[i]) || !std::isfinite(b[i])) {
            throw NonFinite("kendall_tau input contains NaN or infinity");
        }
    }
    std::int64_t concordant = 0;
    std::int64_t discordant = 0;
    for (std::size_t j = 0; j + 1 < m; ++j) {
        for (std::size_t k = j + 1; k < m; ++k) {
            const double da = a[j] - a[k];
            const double db = b[j] - b[k];
            if (da != 0.0 && db != 0.0) {
                // Sign comparison, not a product: the product could
                // underflow to zero and miscount the pair as tied.
                if ((da > 0.0) == (db > 0.0)) {
                    ++concordant;
                } else {
                    ++discordant;
                }
            }
        }
    }
    const auto pairs = static_cast<double>(m * (m - 1) / 2);
    return static_cast<double>(concordant - discordant) / pairs;
}

double average_row_kendall(const Matrix& predicted, const Matrix& truth) {
    if (predicted.rows() != truth.rows() ||
        predicted.cols() != truth.cols()) {
        throw DimensionMismatch("predicted is " + shape(predicted) +
                                " but truth is " + shape(truth));
    }
    if (predicted.rows() < 1) {
        throw DimensionMismatch("no rows to correlate");
    }
    const Index n = predicted.rows();
    const auto q = static_cast<std::size_t>(predicted.cols());
    double sum = 0.0;
    for (Index i = 0; i < n; ++i) {
        sum += kendall_tau({predicted.row(i).data(), q},
                           {truth.row(i).data(), q});
    }
    return sum / static_cast<double>(n);
}

RankVector row_ordering(const Vector& x, const CoefficientMatrix& B) {
    if (x.size() != B.B.rows()) {
        throw DimensionMismatch("covariate vector has " +
                                std::to_string(x.size()) +
                                " entries but coefficients have " +
                                std::to_string(B.B.rows()) + " rows");
    }
    return B.B.transpose() * x;
}

} // namespace ordreg
