#pragma once

#include <stdexcept>
#include <string>

namespace eivreg {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Vector or matrix sizes do not agree.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A scalar argument lies outside the domain of the operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A requested object (signal, dataset) cannot be built with the given parameters.
class ConstructionError : public Error {
public:
    using Error::Error;
};

/// A documented precondition on an input was violated.
class ContractError : public Error {
public:
    using Error::Error;
};

/// A non-finite value appeared during an iterative computation.
class NumericError : public Error {
public:
    using Error::Error;
};

/// The observation law collapses to a point mass (sigma_w = sigma_e = 0).
class DegenerateError : public Error {
public:
    using Error::Error;
};

/// A brute-force routine was asked for a problem larger than it supports.
class CapacityError : public Error {
public:
    using Error::Error;
};

class FitError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class AggregationError : public Error {
public:
    using Error::Error;
};

class ReportError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace eivreg
