#pragma once

#include <string>
#include <string_view>

#include "abr/types.hpp"

namespace abr {

/// Parses a strict 'YYYY-MM-DD' date. Throws MalformedDate on a wrong shape
/// or an out-of-range month/day.
Date parse_date(std::string_view text);

std::string format_date(Date date);

Date date_from_civil(int year, unsigned month, unsigned day);

}  // namespace abr
