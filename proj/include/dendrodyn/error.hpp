#ifndef DENDRODYN_ERROR_HPP
#define DENDRODYN_ERROR_HPP

#include <stdexcept>
#include <string>

namespace dendrodyn {

enum class ErrorCode {
    // space construction and geometry
    DisconnectedSpace,
    NonpositiveLength,
    DuplicateId,
    UnknownId,
    NoCycles,
    NotATree,
    EmptyTarget,
    // homeomorphisms
    NotBijective,
    Discontinuous,
    SpecialPointViolation,
    SpaceMismatch,
    NotACircle,
    NotPreserving,
    // minimal sets
    Unclassified,
    NoFiniteOrbitFound,
    TranslateEnumerationOpen,
    // quotient
    YNotInvariant,
    CrossingViolation,
    NoFiniteOrbitKnown,
    // hyperspace
    EmptySet,
    NoLimit,
    // orbit structure
    SpaceIsCircle,
    // scenarios and CLI
    ParseError,
    ValidationError,
    UnknownTask,
    ParameterError,
    InvalidArgument,
};

inline const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::DisconnectedSpace: return "DisconnectedSpace";
        case ErrorCode::NonpositiveLength: return "NonpositiveLength";
        case ErrorCode::DuplicateId: return "DuplicateId";
        case ErrorCode::UnknownId: return "UnknownId";
        case ErrorCode::NoCycles: return "NoCycles";
        case ErrorCode::NotATree: return "NotATree";
        case ErrorCode::EmptyTarget: return "EmptyTarget";
        case ErrorCode::NotBijective: return "NotBijective";
        case ErrorCode::Discontinuous: return "Discontinuous";
        case ErrorCode::SpecialPointViolation: return "SpecialPointViolation";
        case ErrorCode::SpaceMismatch: return "SpaceMismatch";
        case ErrorCode::NotACircle: return "NotACircle";
        case ErrorCode::NotPreserving: return "NotPreserving";
        case ErrorCode::Unclassified: return "Unclassified";
        case ErrorCode::NoFiniteOrbitFound: return "NoFiniteOrbitFound";
        case ErrorCode::TranslateEnumerationOpen: return "TranslateEnumerationOpen";
        case ErrorCode::YNotInvariant: return "YNotInvariant";
        case ErrorCode::CrossingViolation: return "CrossingViolation";
        case ErrorCode::NoFiniteOrbitKnown: return "NoFiniteOrbitKnown";
        case ErrorCode::EmptySet: return "EmptySet";
        case ErrorCode::NoLimit: return "NoLimit";
        case ErrorCode::SpaceIsCircle: return "SpaceIsCircle";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::ValidationError: return "ValidationError";
        case ErrorCode::UnknownTask: return "UnknownTask";
        case ErrorCode::ParameterError: return "ParameterError";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace dendrodyn

#endif  // DENDRODYN_ERROR_HPP
