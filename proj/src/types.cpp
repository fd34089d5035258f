#include "abr/types.hpp"

#include "abr/error.hpp"

namespace abr {

std::string_view to_string(ColumnType type) {
    switch (type) {
        case ColumnType::Int32: return "INT32";
        case ColumnType::Float64: return "FLOAT64";
        case ColumnType::Date32: return "DATE32";
        case ColumnType::String: return "STRING";
    }
    return "?";
}

ColumnType parse_column_type(std::string_view name) {
    if (name == "INT32") return ColumnType::Int32;
    if (name == "FLOAT64") return ColumnType::Float64;
    if (name == "DATE32") return ColumnType::Date32;
    if (name == "STRING") return ColumnType::String;
    throw Error(ErrorCode::InvalidDescriptor, "unknown column type '" + std::string(name) + "'");
}

ColumnType type_of(const Value& value) {
    switch (value.index()) {
        case 0: return ColumnType::Int32;
        case 1: return ColumnType::Float64;
        case 2: return ColumnType::Date32;
        default: return ColumnType::String;
    }
}

}  // namespace abr
