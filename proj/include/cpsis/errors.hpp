#pragma once

#include <stdexcept>
#include <string>

namespace cpsis {

/// Base class for everything the engine throws.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Rejected user input (CLI exit code 2).
struct ValidationError : Error {
    using Error::Error;
};

struct EmptyInput : ValidationError {
    EmptyInput() : ValidationError("degree distribution is empty") {}
};

struct NonPositiveEntry : ValidationError {
    explicit NonPositiveEntry(const std::string& what) : ValidationError(what) {}
};

struct DuplicateDegree : ValidationError {
    explicit DuplicateDegree(long long degree)
        : ValidationError("duplicate degree class " + std::to_string(degree)) {}
};

struct DegenerateDistribution : ValidationError {
    DegenerateDistribution()
        : ValidationError("degenerate distribution: <n^2> = <n> (all degrees 1), epidemic threshold undefined") {}
};

struct CountExceedsClass : ValidationError {
    explicit CountExceedsClass(const std::string& what) : ValidationError(what) {}
};

struct InvalidParameter : ValidationError {
    explicit InvalidParameter(const std::string& what) : ValidationError(what) {}
};

/// Argument outside the mathematical domain of an operation.
struct OutOfDomain : Error {
    explicit OutOfDomain(const std::string& what) : Error(what) {}
};

/// S_s dropped to (numerical) zero; the model is undefined there.
struct SusceptibleStubsExhausted : Error {
    SusceptibleStubsExhausted() : Error("susceptible stub count S_s exhausted") {}
};

/// Integration failures (CLI exit code 3).
struct IntegrationError : Error {
    using Error::Error;
};

struct StepCapExceeded : IntegrationError {
    explicit StepCapExceeded(long long cap)
        : IntegrationError("integration exceeded the step cap of " + std::to_string(cap)) {}
};

struct StepSizeUnderflow : IntegrationError {
    StepSizeUnderflow() : IntegrationError("adaptive step size underflowed") {}
};

/// No endemic state for tau <= tau_c (CLI exit code 4).
struct BelowThreshold : Error {
    BelowThreshold() : Error("tau <= tau_c: no admissible endemic steady state") {}
};

struct BracketFailure : Error {
    explicit BracketFailure(const std::string& what) : Error(what) {}
};

struct RootNotBracketed : Error {
    explicit RootNotBracketed(const std::string& what) : Error(what) {}
};

struct VariantNotApplicable : Error {
    explicit VariantNotApplicable(const std::string& what) : Error(what) {}
};

struct NoConvergence : Error {
    explicit NoConvergence(const std::string& what) : Error(what) {}
};

}  // namespace cpsis
