#pragma once

#include <stdexcept>
#include <string>

namespace hybridplant {

// Error taxonomy shared by every module. The CLI maps these onto exit codes:
// config/validation -> 2, solver/simulation -> 3, I/O -> 4.

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A declared input column or field is missing or has the wrong shape.
struct SchemaError : ConfigError {
    using ConfigError::ConfigError;
};

// Parsed data violates a value-level invariant (negative irradiance, ...).
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Rows out of order or not on the required cadence.
struct SequenceError : ValidationError {
    using ValidationError::ValidationError;
};

struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SimulationFault : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace hybridplant
