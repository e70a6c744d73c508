#include "siht/error.hpp"

namespace siht {

std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::ZeroColumn: return "ZeroColumn";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::BudgetTooLarge: return "BudgetTooLarge";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::InvalidStructure: return "InvalidStructure";
    case ErrorCode::EmptySet: return "EmptySet";
    case ErrorCode::SingletonSelf: return "SingletonSelf";
    case ErrorCode::RhoNotContractive: return "RhoNotContractive";
    case ErrorCode::BadAlpha: return "BadAlpha";
    case ErrorCode::AllSetsEliminated: return "AllSetsEliminated";
    case ErrorCode::TooFewSources: return "TooFewSources";
    case ErrorCode::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(what), code_(code)
{
}

void fail(ErrorCode code, const std::string& detail)
{
    throw Error(code, std::string(to_string(code)) + ": " + detail);
}

} // namespace siht
