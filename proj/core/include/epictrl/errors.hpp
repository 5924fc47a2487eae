#pragma once

#include <stdexcept>
#include <string>

namespace epictrl {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input tables or configuration documents.
class SchemaError : public Error {
public:
    using Error::Error;
};

class EmptyDistributionError : public Error {
public:
    using Error::Error;
};

/// A numeric parameter outside its admissible range.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// The integrator produced NaN or a compartment below the negative tolerance.
class IntegrationFault : public Error {
public:
    using Error::Error;
};

/// A requested control target cannot be met (e.g. non-positive R^rho).
class InfeasibleError : public Error {
public:
    using Error::Error;
};

/// Root search or equilibrium analysis could not produce an answer.
class AnalysisFailure : public Error {
public:
    using Error::Error;
};

class InsufficientHistory : public Error {
public:
    using Error::Error;
};

} // namespace epictrl
