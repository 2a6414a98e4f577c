#include "glyphrank/error.hpp"

namespace glyphrank {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::TooLong: return "TooLong";
    case ErrorCode::InvalidUtf8: return "InvalidUtf8";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::Truncated: return "Truncated";
    case ErrorCode::Malformed: return "Malformed";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::RowMismatch: return "RowMismatch";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::DuplicateLabel: return "DuplicateLabel";
    case ErrorCode::NoRadical: return "NoRadical";
    case ErrorCode::EmptyIndex: return "EmptyIndex";
    case ErrorCode::MissingIds: return "MissingIds";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::EmptyMask: return "EmptyMask";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::InvalidTemperature: return "InvalidTemperature";
    case ErrorCode::EpochOutOfRange: return "EpochOutOfRange";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::MissingTruth: return "MissingTruth";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

namespace {
std::string format_message(ErrorCode code, const std::string& what, std::optional<std::size_t> record) {
    std::string msg{to_string(code)};
    msg += ": ";
    msg += what;
    if (record) {
        msg += " (record ";
        msg += std::to_string(*record);
        msg += ")";
    }
    return msg;
}
}  // namespace

Error::Error(ErrorCode code, const std::string& what, std::optional<std::size_t> record)
    : std::runtime_error(format_message(code, what, record)), code_(code), record_(record) {}

}  // namespace glyphrank
