#pragma once

#include <stdexcept>
#include <string>

namespace rdu {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A probability level or weighting argument outside its admissible range.
class DomainError : public Error {
public:
    using Error::Error;
};

/// An argument outside the domain or image of a utility function.
class RangeError : public Error {
public:
    using Error::Error;
};

/// A subjective operation whose utility target leaves the image of phi.
class ImageOverflowError : public Error {
public:
    using Error::Error;
};

/// Operands that do not live on the same state/outcome space.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// A state label that is not part of the variable.
class LookupError : public Error {
public:
    using Error::Error;
};

/// A construction-time invariant violation (probabilities, monotonicity, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Inputs that are individually valid but may not be combined.
class UnsupportedCombinationError : public Error {
public:
    using Error::Error;
};

/// Tabulated penalty queried at a prior that is not on its grid.
class UnknownPriorError : public Error {
public:
    using Error::Error;
};

/// A preference configuration that an operation cannot work with.
class ConfigurationError : public Error {
public:
    using Error::Error;
};

/// Evaluation budget too small for the requested search.
class BudgetError : public Error {
public:
    using Error::Error;
};

} // namespace rdu
