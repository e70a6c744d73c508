#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace siht {

enum class ErrorCode {
    ZeroColumn,
    DimensionMismatch,
    SingularSystem,
    BudgetTooLarge,
    IndexOutOfRange,
    InvalidStructure,
    EmptySet,
    SingletonSelf,
    RhoNotContractive,
    BadAlpha,
    AllSetsEliminated,
    TooFewSources,
    ConfigError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Single exception type for the library; `code()` distinguishes failure kinds.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what);

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& detail);

} // namespace siht
