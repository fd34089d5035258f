#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>

namespace abr {

enum class ColumnType : std::uint8_t { Int32, Float64, Date32, String };

/// Days since 1970-01-01 in the proleptic Gregorian calendar.
struct Date {
    std::int32_t days = 0;
    friend auto operator<=>(const Date&, const Date&) = default;
};

/// A single cell. DATE32 values are carried as `Date` so they never mix with
/// INT32 arithmetic.
using Value = std::variant<std::int32_t, double, Date, std::string>;

std::string_view to_string(ColumnType type);
ColumnType parse_column_type(std::string_view name);  // throws InvalidDescriptor

/// Bytes per element. STRING columns store 4-byte start offsets; their
/// payload bytes live in a separate region.
constexpr std::size_t element_width(ColumnType type) {
    return type == ColumnType::Float64 ? 8 : 4;
}

constexpr bool is_numeric(ColumnType type) {
    return type == ColumnType::Int32 || type == ColumnType::Float64;
}

ColumnType type_of(const Value& value);

}  // namespace abr
