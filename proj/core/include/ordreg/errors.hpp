#pragma once

#include <stdexcept>
#include <string>

namespace ordreg {

// Base class for every error this library throws on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Operands whose shapes cannot be combined (e.g. X rows != Y rows).
class DimensionMismatch : public Error {
public:
    using Error::Error;
};

// A coefficient matrix whose canonical form is undefined because the
// shifted matrix has Frobenius norm below 1e-12.
class DegenerateMatrix : public Error {
public:
    using Error::Error;
};

// Row/column/coordinate index outside the matrix being addressed.
class IndexOutOfRange : public Error {
public:
    using Error::Error;
};

// Inputs contain NaN or infinity where finite values are required.
class NonFinite : public Error {
public:
    using Error::Error;
};

// Kendall tau over sequences of length < 2.
class InsufficientData : public Error {
public:
    using Error::Error;
};

// Kendall tau where one sequence is constant (tau undefined).
class ZeroVariance : public Error {
public:
    using Error::Error;
};

// Pearson correlation of a vector against itself-degenerate input,
// or a metric asked to normalise by a zero norm.
class ZeroNorm : public Error {
public:
    using Error::Error;
};

// Quadratic-cost oracle asked to handle an instance beyond its guard.
class ProblemTooLarge : public Error {
public:
    using Error::Error;
};

// Every restart of the solver hit a degenerate canonical form.
class AllRestartsDegenerate : public Error {
public:
    using Error::Error;
};

// Synthetic generation could not produce an admissible draw within the
// retry budget.
class GenerationFailed : public Error {
public:
    using Error::Error;
};

// A preference-ordering row is not a permutation of 1..q.
class NotAPermutation : public Error {
public:
    using Error::Error;
};

// Malformed CSV or manifest input; message carries file:line:column.
class ParseError : public Error {
public:
    using Error::Error;
};

} // namespace ordreg
