#include "abr/error.hpp"

#include <fmt/core.h>

namespace abr {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::UnknownTable: return "UnknownTable";
        case ErrorCode::UnknownColumn: return "UnknownColumn";
        case ErrorCode::DuplicateTable: return "DuplicateTable";
        case ErrorCode::DatabaseSealed: return "DatabaseSealed";
        case ErrorCode::NotSealed: return "NotSealed";
        case ErrorCode::OpenBuilder: return "OpenBuilder";
        case ErrorCode::RowOutOfRange: return "RowOutOfRange";
        case ErrorCode::TypeMismatch: return "TypeMismatch";
        case ErrorCode::ColumnLengthMismatch: return "ColumnLengthMismatch";
        case ErrorCode::EmptyProjection: return "EmptyProjection";
        case ErrorCode::UnsupportedShape: return "UnsupportedShape";
        case ErrorCode::EmptyAggregate: return "EmptyAggregate";
        case ErrorCode::Overflow: return "Overflow";
        case ErrorCode::MalformedDate: return "MalformedDate";
        case ErrorCode::FieldCountMismatch: return "FieldCountMismatch";
        case ErrorCode::ConversionError: return "ConversionError";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::UnknownQuery: return "UnknownQuery";
        case ErrorCode::KernelMismatch: return "KernelMismatch";
        case ErrorCode::InvalidDescriptor: return "InvalidDescriptor";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(fmt::format("{}: {}", to_string(code), message)), code_(code) {}

Error::Error(ErrorCode code, const std::string& message, std::size_t line,
             std::optional<std::string> column)
    : std::runtime_error(column ? fmt::format("{}: line {}, column {}: {}", to_string(code),
                                              line, *column, message)
                                : fmt::format("{}: line {}: {}", to_string(code), line, message)),
      code_(code),
      line_(line),
      column_(std::move(column)) {}

}  // namespace abr
