#pragma once

#include <stdexcept>
#include <string>

namespace waring {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Precondition or shape violation (dimension mismatch, k out of range, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A non-real root has no conjugate partner within tolerance.
class PairingFailure : public Error {
public:
    using Error::Error;
};

class NotSigmaInvariant : public Error {
public:
    using Error::Error;
};

class DuplicatePoint : public Error {
public:
    using Error::Error;
};

/// No square-free apolar generator was found up to degree d.
class RankSearchExhausted : public Error {
public:
    using Error::Error;
};

/// Every sampled line through the point was tangent or singular.
class RetriesExhausted : public Error {
public:
    using Error::Error;
};

/// A decomposition engine produced no certificate within tolerance.
class DecompositionFailure : public Error {
public:
    DecompositionFailure(const std::string& what, double best_residual)
        : Error(what), best_residual_(best_residual) {}

    double best_residual() const noexcept { return best_residual_; }

private:
    double best_residual_;
};

/// Malformed input document; `path()` names the offending JSON location.
class SchemaError : public Error {
public:
    SchemaError(std::string path, const std::string& what)
        : Error(path + ": " + what), path_(std::move(path)) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

} // namespace waring
