#pragma once

#include <stdexcept>
#include <string>

namespace blowup {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// point outside the cone / profile denominator not positive
struct DomainError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct UnsupportedDimension : Error { using Error::Error; };
struct PoleError : Error { using Error::Error; };
struct ConvergenceError : Error { using Error::Error; };
struct NonConvergedFit : Error { using Error::Error; };
struct BlowupDetected : Error {
    BlowupDetected(const std::string& what, double tau_) : Error(what), tau(tau_) {}
    double tau;
};
struct ModulationDiverged : Error { using Error::Error; };
struct BracketError : Error { using Error::Error; };
struct AssertionFailure : Error { using Error::Error; };
struct IOError : Error { using Error::Error; };

// Not an exception: spectral derivatives still return a value, the caller decides.
struct ResolutionWarning {
    bool raised = false;
    double tail = 0.0;
};

}  // namespace blowup
