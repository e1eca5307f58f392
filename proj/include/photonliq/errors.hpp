#pragma once

#include <stdexcept>
#include <string>

namespace photonliq {

// Error taxonomy. The CLI maps each family onto a process exit status.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation (negative time, N = 0, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// A complex frequency coincides with a singularity of a transform.
class PoleError : public Error {
public:
    using Error::Error;
};

// Iterative numerics failed (non-convergence, singular systems, non-unique kernels).
class NumericError : public Error {
public:
    using Error::Error;
};

// Problem size above what the dense representation supports.
class CapacityError : public Error {
public:
    using Error::Error;
};

// Input data rejected (unsorted timestamps, empty streams, grid mismatches).
class ValidationError : public Error {
public:
    using Error::Error;
};

// Curves or histograms whose grids cannot be combined.
class ShapeError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace photonliq
