#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace vulnet {

/// Base class for all library errors.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file; message carries file, row and column context.
class ParseError : public Error {
  public:
    using Error::Error;
};

/// Codes in a data file cannot be resolved against the node index.
class SchemaError : public Error {
  public:
    using Error::Error;
};

/// Invalid argument values (generator parameters, dimension mismatches).
class ArgumentError : public Error {
  public:
    using Error::Error;
};

/// A restriction specification is inconsistent (target equals source,
/// unknown country or sector codes).
class SpecError : public Error {
  public:
    using Error::Error;
};

/// Kernel could not be certified stable. Carries the columns whose sums
/// reach or exceed one.
class StabilityError : public Error {
  public:
    StabilityError(const std::string& what, std::vector<std::uint32_t> offenders)
        : Error(what), offending_columns(std::move(offenders)) {}

    std::vector<std::uint32_t> offending_columns;
};

/// A restricted supplier sells essentially everything to the target, so the
/// reallocation normalizer is unbounded.
class TotalDependenceError : public Error {
  public:
    TotalDependenceError(const std::string& what, std::uint32_t col, double share)
        : Error(what), column(col), target_share(share) {}

    std::uint32_t column;
    double target_share;
};

/// Linear solve failed to meet the residual contract.
class SolveError : public Error {
  public:
    using Error::Error;
};

/// Dense-oracle operation requested beyond its size guard.
class SizeGuardError : public Error {
  public:
    using Error::Error;
};

/// Score normalization is undefined for the class (maximum is not positive,
/// or a filter removed every entry).
class DegenerateClassError : public Error {
  public:
    using Error::Error;
};

} // namespace vulnet
