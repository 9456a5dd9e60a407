#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace twinbeam {

// Base of every error the library throws.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
  public:
    using Error::Error;
};

// Threshold so large that no sample survives postselection.
class DegeneratePolicyError : public Error {
  public:
    using Error::Error;
};

// Misuse of the protocol: empty runs, mismatched transcripts.
class ProtocolError : public Error {
  public:
    using Error::Error;
};

// Not enough samples or decisions to produce an estimate.
class InsufficientDataError : public Error {
  public:
    using Error::Error;
};

// Invalid run configuration. `field` names the offending key path.
class ConfigError : public Error {
  public:
    ConfigError(std::string field, const std::string& what)
        : Error(field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

  private:
    std::string field_;
};

// Malformed input data (sample files). `row` is 1-based; 0 means the header.
class DataError : public Error {
  public:
    DataError(std::size_t row, const std::string& what)
        : Error("row " + std::to_string(row) + ": " + what), row_(row) {}

    std::size_t row() const noexcept { return row_; }

  private:
    std::size_t row_;
};

} // namespace twinbeam
