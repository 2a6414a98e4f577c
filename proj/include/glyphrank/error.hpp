#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace glyphrank {

enum class ErrorCode {
    EmptyInput,
    TooLong,
    InvalidUtf8,
    BadMagic,
    VersionMismatch,
    Truncated,
    Malformed,
    DimMismatch,
    RowMismatch,
    ZeroVector,
    NonFinite,
    DuplicateLabel,
    NoRadical,
    EmptyIndex,
    MissingIds,
    InvalidParams,
    EmptyMask,
    IndexOutOfRange,
    InvalidTemperature,
    EpochOutOfRange,
    LengthMismatch,
    MissingTruth,
    UnknownLabel,
    Io,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure surfaced by the library. `record()` is set when the error
/// can be pinned to a record position in an index, query or batch file.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what, std::optional<std::size_t> record = std::nullopt);

    ErrorCode code() const noexcept { return code_; }
    std::optional<std::size_t> record() const noexcept { return record_; }

private:
    ErrorCode code_;
    std::optional<std::size_t> record_;
};

}  // namespace glyphrank
