#pragma once

#include <stdexcept>
#include <string>

namespace schwinger {

// All library failures derive from Error so callers (the CLI in particular)
// can map them onto exit codes without string matching.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside a hard size cap (partition order, moment order, ...).
class BoundsError : public Error {
 public:
  using Error::Error;
};

// Mathematically inadmissible argument: odd pairing order, mass below floor,
// mismatched grids, incompatible isometry.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A subset map handed to a partition transform lacks an entry.
class IncompleteInputError : public Error {
 public:
  using Error::Error;
};

// Packet narrower than the lattice can resolve.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

// Invalid model tree: weights, depth, spectral floor.
class ModelError : public Error {
 public:
  using Error::Error;
};

// Caller violated a documented precondition of a check.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Sample sets drawn from different models or grids were mixed.
class ProvenanceError : public Error {
 public:
  using Error::Error;
};

// Structured input document does not match its schema. `field` names the
// offending key path.
class SchemaError : public Error {
 public:
  SchemaError(std::string field, const std::string& what)
      : Error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// Experiment specification inconsistent with the requested experiment.
class SpecError : public Error {
 public:
  using Error::Error;
};

// Finite-difference or extrapolation lost too many digits to be trusted.
class PrecisionError : public Error {
 public:
  using Error::Error;
};

}  // namespace schwinger
