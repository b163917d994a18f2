#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rbridge {

enum class ErrorCode {
    InvalidArgument,
    ZeroMass,
    OutOfDomain,
    Diverged,
    LinearSolveFailure,
    DomainMismatch,
    ProxNoConverge,
    NonPositive,
    FloorDominant,
    MaxIterations,
    ControlOutOfRange,
    MissingSolution,
    ConfigError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exception carrying a machine-readable code next to the message.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace rbridge
