#include "spadep/error.hpp"

namespace spadep {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::NotColumnStochastic: return "NotColumnStochastic";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::DegenerateShape: return "DegenerateShape";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::DivergenceDetected: return "DivergenceDetected";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::EmptySelection: return "EmptySelection";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

}  // namespace spadep
