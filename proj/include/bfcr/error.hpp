#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace bfcr {

enum class Errc {
    EmptyInput,
    ParseError,
    NonFiniteValue,
    InvalidParams,
    ZeroAnchor,
    ContinuationUnbounded,
    TooFewPoints,
    NumericalFailure,
    NonRealSignal,
    ShapeError,
    NoData,
    Io,
};

constexpr std::string_view to_string(Errc code) noexcept {
    switch (code) {
        case Errc::EmptyInput: return "EmptyInput";
        case Errc::ParseError: return "ParseError";
        case Errc::NonFiniteValue: return "NonFiniteValue";
        case Errc::InvalidParams: return "InvalidParams";
        case Errc::ZeroAnchor: return "ZeroAnchor";
        case Errc::ContinuationUnbounded: return "ContinuationUnbounded";
        case Errc::TooFewPoints: return "TooFewPoints";
        case Errc::NumericalFailure: return "NumericalFailure";
        case Errc::NonRealSignal: return "NonRealSignal";
        case Errc::ShapeError: return "ShapeError";
        case Errc::NoData: return "NoData";
        case Errc::Io: return "Io";
    }
    return "Unknown";
}

/// Single exception type for the library; `code()` tells callers what went wrong.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message, std::optional<std::size_t> line = std::nullopt)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), line_(line) {}

    Errc code() const noexcept { return code_; }

    /// 1-based input line for ParseError / NonFiniteValue raised while reading text.
    std::optional<std::size_t> line() const noexcept { return line_; }

private:
    Errc code_;
    std::optional<std::size_t> line_;
};

namespace detail {

inline void require_min_points(std::size_t n, std::size_t minimum, std::string_view what) {
    if (n < minimum) {
        throw Error(Errc::TooFewPoints, std::string(what) + " requires at least " + std::to_string(minimum) +
                                            " data points, got " + std::to_string(n));
    }
}

}  // namespace detail
}  // namespace bfcr
