#pragma once

#include <stdexcept>
#include <string>

namespace scatterlab {

// Configuration and input problems (bad files, invalid arguments). The CLI
// maps these to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Numerical failures: singular systems, failed certifications, leakage.
// The CLI maps these to exit code 3.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public ConfigError {
public:
    ParseError(const std::string& where, const std::string& what)
        : ConfigError(where + ": " + what), where_(where) {}
    const std::string& where() const { return where_; }

private:
    std::string where_;
};

class SingularSystemError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class VerificationError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class PauliExclusionError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class LeakageError : public NumericalError {
public:
    LeakageError(const std::string& what, double leakage)
        : NumericalError(what), leakage_(leakage) {}
    double leakage() const { return leakage_; }

private:
    double leakage_;
};

class UnreliablePhaseError : public NumericalError {
public:
    UnreliablePhaseError(const std::string& what, double overlap)
        : NumericalError(what), overlap_(overlap) {}
    double overlap() const { return overlap_; }

private:
    double overlap_;
};

// theta/pi is rational with a period too short to reach the requested precision.
class UnreachableError : public NumericalError {
public:
    explicit UnreachableError(long long period)
        : NumericalError("UNREACHABLE: G^k is periodic with period " + std::to_string(period)),
          period_(period) {}
    long long period() const { return period_; }

private:
    long long period_;
};

class BudgetExceededError : public NumericalError {
public:
    explicit BudgetExceededError(long long cap)
        : NumericalError("BUDGET_EXCEEDED: no collision count k <= " + std::to_string(cap) +
                         " reaches the requested precision"),
          cap_(cap) {}
    long long cap() const { return cap_; }

private:
    long long cap_;
};

}  // namespace scatterlab
