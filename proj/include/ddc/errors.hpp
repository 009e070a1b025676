#pragma once

#include <stdexcept>
#include <string>

namespace ddc {

/// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Incompatible matrix/vector shapes.
struct DimensionMismatch : Error {
    using Error::Error;
};

/// A square matrix was required.
struct NotSquare : Error {
    using Error::Error;
};

/// A matrix failed its unitarity certificate.
struct NotUnitary : Error {
    NotUnitary(const std::string& msg, double defect_) : Error(msg), defect(defect_) {}
    double defect;
};

/// Input columns to an orthonormal completion were not orthonormal.
struct InputNotOrthonormal : Error {
    InputNotOrthonormal(const std::string& msg, double defect_) : Error(msg), defect(defect_) {}
    double defect;
};

/// Argument outside the mathematical domain of an operation.
struct DomainError : Error {
    using Error::Error;
};

/// Malformed value for a domain type (bad spectrum, bad file field, ...).
struct InvalidArgument : Error {
    using Error::Error;
};

/// A family failed pairwise weighted-trace orthogonality at the required tolerance.
struct FamilyNotOrthogonal : Error {
    FamilyNotOrthogonal(const std::string& msg, double residual_) : Error(msg), residual(residual_) {}
    double residual;
};

/// An operation that divides by Schmidt weights was given a spectrum with zeros.
struct SpectrumHasZero : Error {
    using Error::Error;
};

/// The K = d^2-1 completion certificate failed: the spectrum is not uniform.
struct SpectrumNotUniform : Error {
    using Error::Error;
};

/// The recovered completion matrix is not unitary to tolerance.
struct CompletionNotUnitary : Error {
    CompletionNotUnitary(const std::string& msg, double defect_) : Error(msg), defect(defect_) {}
    double defect;
};

/// Pinned search members are not pairwise orthogonal for the given spectrum.
struct PinnedNotOrthogonal : Error {
    PinnedNotOrthogonal(const std::string& msg, double residual_) : Error(msg), residual(residual_) {}
    double residual;
};

}  // namespace ddc
