#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nakamap {

enum class ErrorCode {
    // grids
    MissingFile,
    MalformedHeader,
    PayloadSizeMismatch,
    NonFiniteValue,
    NegativeValue,
    InvalidImage,
    IoFailure,
    DegenerateRange,
    // envelope
    AxialTooShort,
    // nakagami
    NegativeArgument,
    NonPositiveArgument,
    InvalidParams,
    TooFewSamples,
    DegenerateSample,
    ContainsZeroOnly,
    ExcessiveZeros,
    // mapping
    OutOfBounds,
    ImageTooSmall,
    EmptyKernelSet,
    InvalidKernelSpec,
    NotImplemented,
    WrongImageKind,
    // phantom
    InvalidSpec,
    DensityOutOfRange,
    // evaluation
    DimensionMismatch,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exception carrying a machine-checkable code alongside the message.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
    {
    }

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace nakamap
