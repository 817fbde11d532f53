#pragma once

#include <stdexcept>
#include <string>

namespace hypres {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class IntegrationError : public Error {
public:
    IntegrationError(const std::string& what, double last_good_time)
        : Error(what), last_good_time_(last_good_time) {}
    double last_good_time() const noexcept { return last_good_time_; }

private:
    double last_good_time_;
};

class NoConvergence : public Error {
public:
    NoConvergence(const std::string& what, double last_residual)
        : Error(what), last_residual_(last_residual) {}
    double last_residual() const noexcept { return last_residual_; }

private:
    double last_residual_;
};

class NumericalError : public Error {
public:
    using Error::Error;
};

class FixedPointError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class ArityError : public Error {
public:
    using Error::Error;
};

class SectionError : public Error {
public:
    using Error::Error;
};

class ContractError : public Error {
public:
    using Error::Error;
};

class DegeneracyError : public Error {
public:
    using Error::Error;
};

class EmptyRegionError : public Error {
public:
    using Error::Error;
};

class CutoffError : public Error {
public:
    using Error::Error;
};

class PoleError : public Error {
public:
    using Error::Error;
};

class CalibrationFailure : public Error {
public:
    using Error::Error;
};

class SchemaError : public Error {
public:
    using Error::Error;
};

class DependencyError : public Error {
public:
    using Error::Error;
};

}  // namespace hypres
