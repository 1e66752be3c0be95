#include "nakamap/error.hpp"

namespace nakamap {

std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::MalformedHeader: return "MalformedHeader";
    case ErrorCode::PayloadSizeMismatch: return "PayloadSizeMismatch";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::NegativeValue: return "NegativeValue";
    case ErrorCode::InvalidImage: return "InvalidImage";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::DegenerateRange: return "DegenerateRange";
    case ErrorCode::AxialTooShort: return "AxialTooShort";
    case ErrorCode::NegativeArgument: return "NegativeArgument";
    case ErrorCode::NonPositiveArgument: return "NonPositiveArgument";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::DegenerateSample: return "DegenerateSample";
    case ErrorCode::ContainsZeroOnly: return "ContainsZeroOnly";
    case ErrorCode::ExcessiveZeros: return "ExcessiveZeros";
    case ErrorCode::OutOfBounds: return "OutOfBounds";
    case ErrorCode::ImageTooSmall: return "ImageTooSmall";
    case ErrorCode::EmptyKernelSet: return "EmptyKernelSet";
    case ErrorCode::InvalidKernelSpec: return "InvalidKernelSpec";
    case ErrorCode::NotImplemented: return "NotImplemented";
    case ErrorCode::WrongImageKind: return "WrongImageKind";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::DensityOutOfRange: return "DensityOutOfRange";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    }
    return "Unknown";
}

} // namespace nakamap
