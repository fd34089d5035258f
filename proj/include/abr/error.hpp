#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace abr {

enum class ErrorCode {
    UnknownTable,
    UnknownColumn,
    DuplicateTable,
    DatabaseSealed,
    NotSealed,
    OpenBuilder,
    RowOutOfRange,
    TypeMismatch,
    ColumnLengthMismatch,
    EmptyProjection,
    UnsupportedShape,
    EmptyAggregate,
    Overflow,
    MalformedDate,
    FieldCountMismatch,
    ConversionError,
    IoError,
    UnknownQuery,
    KernelMismatch,
    InvalidDescriptor,
};

std::string_view to_string(ErrorCode code);

/// Every engine failure surfaces as this exception. `line` is set for
/// `.tbl` parse failures (1-based), `column` when a single field is at fault.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);
    Error(ErrorCode code, const std::string& message, std::size_t line,
          std::optional<std::string> column = std::nullopt);

    ErrorCode code() const noexcept { return code_; }
    std::optional<std::size_t> line() const noexcept { return line_; }
    const std::optional<std::string>& column() const noexcept { return column_; }

private:
    ErrorCode code_;
    std::optional<std::size_t> line_;
    std::optional<std::string> column_;
};

}  // namespace abr
