#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mvdyn {

enum class ErrorCode {
    ParseError,
    NonConvergence,
    DegenerateFamily,
    SizeMismatch,
    IdenticallyZero,
    NotPerfectSquare,
    NoOddRoot,
    BranchCollision,
    GenealogyAmbiguous,
    PreconditionFailed,
    RootProximity,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the library; callers dispatch on code().
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::NonConvergence: return "NonConvergence";
        case ErrorCode::DegenerateFamily: return "DegenerateFamily";
        case ErrorCode::SizeMismatch: return "SizeMismatch";
        case ErrorCode::IdenticallyZero: return "IdenticallyZero";
        case ErrorCode::NotPerfectSquare: return "NotPerfectSquare";
        case ErrorCode::NoOddRoot: return "NoOddRoot";
        case ErrorCode::BranchCollision: return "BranchCollision";
        case ErrorCode::GenealogyAmbiguous: return "GenealogyAmbiguous";
        case ErrorCode::PreconditionFailed: return "PreconditionFailed";
        case ErrorCode::RootProximity: return "RootProximity";
    }
    return "Unknown";
}

}  // namespace mvdyn
