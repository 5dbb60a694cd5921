#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hdrdist {

enum class ErrorCode {
    NonFiniteInput,
    OutOfRange,
    SizeMismatch,
    OddWidth,
    MalformedHeader,
    TruncatedPayload,
    UnsupportedMaxVal,
    IndexOutOfBounds,
    TooFewReadings,
    LayoutMismatch,
    BitDepthMismatch,
    EmptyModel,
    AxisMismatch,
    InsufficientBins,
    ParseError,
    MissingPath,
    DuplicateSplit,
    PatchTooLarge,
    InvalidArgument,
    IoFailure,
};

std::string_view to_string(ErrorCode code);

// All library failures surface as this exception; code() identifies the
// failure class so callers (notably the CLI) can map it to an exit status.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

} // namespace hdrdist
