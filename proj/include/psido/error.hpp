#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace psido {

enum class ErrorKind {
    DegenerateForm,
    DimensionMismatch,
    NumericFailure,
    Resolution,
    IncompatibleGrid,
    NonFinite,
    Coverage,
    NoSpectralGap,
    EigenvalueOnContour,
    QuadratureNonConvergence,
    Precondition,
    ContractionViolated,
    NotConverged,
    NonInvertible,
    EllipticityFailure,
    InsufficientSamples,
    OutsideBox,
    UnknownId,
    Config,
    Usage,
    Io,
};

inline std::string_view to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::DegenerateForm: return "degenerate-form";
    case ErrorKind::DimensionMismatch: return "dimension-mismatch";
    case ErrorKind::NumericFailure: return "numeric-failure";
    case ErrorKind::Resolution: return "resolution";
    case ErrorKind::IncompatibleGrid: return "incompatible-grid";
    case ErrorKind::NonFinite: return "non-finite";
    case ErrorKind::Coverage: return "coverage";
    case ErrorKind::NoSpectralGap: return "no-spectral-gap";
    case ErrorKind::EigenvalueOnContour: return "eigenvalue-on-contour";
    case ErrorKind::QuadratureNonConvergence: return "quadrature-non-convergence";
    case ErrorKind::Precondition: return "precondition";
    case ErrorKind::ContractionViolated: return "contraction-violated";
    case ErrorKind::NotConverged: return "not-converged";
    case ErrorKind::NonInvertible: return "non-invertible";
    case ErrorKind::EllipticityFailure: return "ellipticity-failure";
    case ErrorKind::InsufficientSamples: return "insufficient-samples";
    case ErrorKind::OutsideBox: return "outside-box";
    case ErrorKind::UnknownId: return "unknown-id";
    case ErrorKind::Config: return "config";
    case ErrorKind::Usage: return "usage";
    case ErrorKind::Io: return "io";
    }
    return "unknown";
}

/// Library exception. Carries a machine-readable kind and, for iterative
/// failures, the residual trace that led to the failure.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what, std::vector<double> trace = {})
        : std::runtime_error(std::string(to_string(kind)) + ": " + what)
        , kind_(kind)
        , trace_(std::move(trace))
    {
    }

    ErrorKind kind() const noexcept { return kind_; }
    const std::vector<double>& trace() const noexcept { return trace_; }

private:
    ErrorKind kind_;
    std::vector<double> trace_;
};

} // namespace psido
