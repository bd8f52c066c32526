#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace offreach {

enum class ErrorCode {
    NonPositiveW,
    DegenerateRange,
    OutOfDomain,
    BoundEscape,
    CouplingCycle,
    InvalidSpec,
    EmptySet,
    FrameMismatch,
    RadiusClipped,
    NonFiniteState,
    DisconnectedNominal,
    HorizonExceedsBound,
    BoundEscaped,
    NoSdf,
    OutOfGrid,
    MissingM2,
    NotLowerTriangular,
    BlockShapeMismatch,
    MissingReference,
    UnsupportedDim,
    ConfigError,
    IoError,
};

std::string_view to_string(ErrorCode c) noexcept;

// Config and I/O problems map to exit code 2, everything else to 3.
bool is_config_error(ErrorCode c) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace offreach
