#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "abr/query.hpp"

namespace abr {

inline constexpr std::string_view kDefaultView = "jan_orders";

/// Ids accepted by `builtin_query`: q1..q6 and q5f.
std::vector<std::string> builtin_query_ids();

/// Throws UnknownQuery. q5f reads the default view.
QueryBuilder builtin_query(std::string_view id);

/// Top 10 orders of one day, by ascending revenue, over the base tables.
QueryBuilder top_orders_on(std::string_view day);

/// The same day's rows picked out of a materialized January view.
QueryBuilder view_day_filter(std::string_view view, std::string_view day);

}  // namespace abr
