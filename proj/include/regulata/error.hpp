#pragma once

#include <stdexcept>
#include <string>

namespace regulata {

enum class ErrorCode {
    ShapeMismatch,
    InvalidArgument,
    HurwitzViolation,
    SingularXi,
    NoUniqueSolution,
    Singular,
    ConvergenceFailure,
    ComplexPairingFailure,
    StepUnderflow,
    NonFiniteState,
    WindowTooShort,
    ConfigError,
    VerificationFailure,
    IoError,
};

const char* to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries one of the codes above so the
// C layer can translate it without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

} // namespace regulata
