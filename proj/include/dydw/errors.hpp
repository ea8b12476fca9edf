#pragma once

#include <stdexcept>
#include <string>

namespace dydw {

// Validation errors: a caller broke a documented precondition.
// The CLI maps these to exit code 2.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParityError : ValidationError {
    using ValidationError::ValidationError;
};
struct WindowError : ValidationError {
    using ValidationError::ValidationError;
};
struct GeometryError : ValidationError {
    using ValidationError::ValidationError;
};
struct HorizonError : ValidationError {
    using ValidationError::ValidationError;
};
struct DomainError : ValidationError {
    using ValidationError::ValidationError;
};

// Diagnostic errors: the computation hit a state that is legal to reach
// but invalidates the requested result (exact ring-time ties, missing root
// brackets, degenerate statistics).  CLI exit code 3.
struct DiagnosticError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TieError : DiagnosticError {
    using DiagnosticError::DiagnosticError;
};
struct SolverError : DiagnosticError {
    using DiagnosticError::DiagnosticError;
};
struct DegenerateError : DiagnosticError {
    using DiagnosticError::DiagnosticError;
};
struct IntegrityError : DiagnosticError {
    using DiagnosticError::DiagnosticError;
};

}  // namespace dydw
