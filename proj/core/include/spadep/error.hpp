#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace spadep {

enum class ErrorCode {
    InvalidInput,
    NotColumnStochastic,
    DimensionMismatch,
    InsufficientData,
    DegenerateShape,
    DegenerateInput,
    DivergenceDetected,
    ParseError,
    SchemaError,
    EmptySelection,
    IoError,
    ConfigError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Single exception type for the library; `code()` says which contract was violated.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// ParseError carrying the 1-based data row (header excluded) that failed.
class ParseError : public Error {
public:
    ParseError(std::size_t row, const std::string& what)
        : Error(ErrorCode::ParseError, "row " + std::to_string(row) + ": " + what), row_(row) {}

    [[nodiscard]] std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

}  // namespace spadep
