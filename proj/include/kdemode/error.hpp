#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kdemode {

/// Base for every failure raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad argument: negative t, level outside (0,1], dimension mismatch, non-finite data.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Operation is not defined for this kernel (e.g. the derivative of the box kernel).
class UnsupportedOperation : public Error {
public:
    using Error::Error;
};

/// kappa'_min vanished or is unbounded on the critical window, so no gamma exists.
class DegenerateKernel : public Error {
public:
    using Error::Error;
};

/// Every mean-shift weight is zero.
class StallError : public Error {
public:
    using Error::Error;
};

class SketchFailure : public Error {
public:
    SketchFailure(const std::string& what, int attempts) : Error(what), attempts_(attempts) {}
    int attempts() const noexcept { return attempts_; }

private:
    int attempts_;
};

/// Sketch was built from a different dataset than the one supplied.
class InconsistentSketch : public Error {
public:
    using Error::Error;
};

class ExtensionFailure : public Error {
public:
    ExtensionFailure(const std::string& what, double worst_ratio) : Error(what), worst_ratio_(worst_ratio) {}
    /// max_m ||x' - m||^2 / ((1 + eps) ||x~ - Pi m||^2) at the last iterate.
    double worst_ratio() const noexcept { return worst_ratio_; }

private:
    double worst_ratio_;
};

class BudgetExceeded : public Error {
public:
    BudgetExceeded(const std::string& what, double count) : Error(what), count_(count) {}
    double count() const noexcept { return count_; }

private:
    double count_;
};

/// Gadget scale A = (1 - 1/k)(Delta - 1) is not positive.
class DegenerateScale : public Error {
public:
    using Error::Error;
};

/// Unreadable or inconsistent configuration / input file.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace kdemode
