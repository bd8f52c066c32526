#include "offreach/error.hpp"

namespace offreach {

std::string_view to_string(ErrorCode c) noexcept
{
    switch (c) {
    case ErrorCode::NonPositiveW: return "NonPositiveW";
    case ErrorCode::DegenerateRange: return "DegenerateRange";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::BoundEscape: return "BoundEscape";
    case ErrorCode::CouplingCycle: return "CouplingCycle";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::EmptySet: return "EmptySet";
    case ErrorCode::FrameMismatch: return "FrameMismatch";
    case ErrorCode::RadiusClipped: return "RadiusClipped";
    case ErrorCode::NonFiniteState: return "NonFiniteState";
    case ErrorCode::DisconnectedNominal: return "DisconnectedNominal";
    case ErrorCode::HorizonExceedsBound: return "HorizonExceedsBound";
    case ErrorCode::BoundEscaped: return "BoundEscaped";
    case ErrorCode::NoSdf: return "NoSdf";
    case ErrorCode::OutOfGrid: return "OutOfGrid";
    case ErrorCode::MissingM2: return "MissingM2";
    case ErrorCode::NotLowerTriangular: return "NotLowerTriangular";
    case ErrorCode::BlockShapeMismatch: return "BlockShapeMismatch";
    case ErrorCode::MissingReference: return "MissingReference";
    case ErrorCode::UnsupportedDim: return "UnsupportedDim";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

bool is_config_error(ErrorCode c) noexcept
{
    return c == ErrorCode::ConfigError || c == ErrorCode::IoError
        || c == ErrorCode::UnsupportedDim;
}

} // namespace offreach
