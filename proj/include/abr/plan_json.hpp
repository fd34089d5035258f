#pragma once

#include <chrono>
#include <string>

#include <json.hpp>

#include "abr/plan.hpp"
#include "abr/result.hpp"

namespace abr {

using Json = nlohmann::json;

/// Plan descriptor:
///   {"planClass", "sources", "joinKey": {"left","right"} | null,
///    "filters": [{"op","column","value","high"?}], "groupKeys": [expr],
///    "aggregates": [{"func","expr"|null,"alias"}],
///    "projections": [{"expr","alias"}], "orderBy": {"key","direction"} | null,
///    "limit": n | null}
/// Expressions: {"column","table"?}, {"literal","type"} (dates as
/// 'YYYY-MM-DD' strings) or {"op": "ADD"|"SUB"|"MUL","left","right"}.
Json plan_to_json(const LogicalPlan& plan);

/// Rebuilds the query; `planClass` is ignored (planning reclassifies).
/// Throws InvalidDescriptor on malformed input.
QueryBuilder query_from_json(const Json& descriptor);

Json expr_to_json(const ScalarExpr& expr);
ScalarExpr expr_from_json(const Json& j);

struct ResultTiming {
    std::chrono::nanoseconds compile{0};
    std::chrono::nanoseconds exec{0};
};

/// {"columns": [{"name","type","values"}], "stats": {"compileMs","execMs","rows"}}
Json result_to_json(const ResultTable& table, const ResultTiming& timing = {});

/// Reads the "columns" part of the result shape.
ResultTable result_from_json(const Json& j);

}  // namespace abr
