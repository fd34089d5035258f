#include "abr/tpch.hpp"

#include <cmath>
#include <random>

#include <fmt/core.h>

#include "abr/date.hpp"
#include "abr/error.hpp"

namespace abr {

TableSchema orders_schema() {
    return {"orders",
            {{"o_orderkey", ColumnType::Int32},
             {"o_orderdate", ColumnType::Date32},
             {"o_totalprice", ColumnType::Float64},
             {"o_shippriority", ColumnType::Int32}}};
}

TableSchema lineitem_schema() {
    return {"lineitem",
            {{"l_orderkey", ColumnType::Int32},
             {"l_extendedprice", ColumnType::Float64},
             {"l_discount", ColumnType::Float64}}};
}

std::uint32_t orders_rows(double scale_factor) {
    // 7 lines per order at most must still fit a uint32 row count.
    if (!(scale_factor > 0) || scale_factor * 1.5e6 * 7 > 4.0e9) {
        throw Error(ErrorCode::InvalidDescriptor, fmt::format("scale factor {} out of range", scale_factor));
    }
    return static_cast<std::uint32_t>(std::llround(1.5e6 * scale_factor));
}

namespace {

// Uniform integer in [lo, hi] by reduction modulo the range width.
std::int64_t draw(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

}  // namespace

void gen_tpch_tables(Database& db, const GenParams& params) {
    const auto n = orders_rows(params.scale_factor);
    std::mt19937_64 rng(params.seed);
    const std::int32_t first_day = date_from_civil(1992, 1, 1).days;
    const std::int32_t last_day = date_from_civil(1998, 8, 2).days;

    auto orders = db.begin_table(orders_schema());
    auto lineitem = db.begin_table(lineitem_schema());
    orders.reserve(n);
    lineitem.reserve(std::size_t{n} * 4);
    for (std::uint32_t i = 0; i < n; ++i) {
        const auto key = static_cast<std::int32_t>(i + 1);
        orders.append_int32(0, key);
        orders.append_date(1, Date{static_cast<std::int32_t>(draw(rng, first_day, last_day))});
        orders.append_float64(2, static_cast<double>(draw(rng, 85'000, 55'500'000)) / 100.0);
        orders.append_int32(3, 0);
        const auto lines = draw(rng, 1, 7);
        for (std::int64_t l = 0; l < lines; ++l) {
            lineitem.append_int32(0, key);
            lineitem.append_float64(1, static_cast<double>(draw(rng, 90'000, 10'500'000)) / 100.0);
            lineitem.append_float64(2, static_cast<double>(draw(rng, 0, 10)) / 100.0);
        }
    }
    orders.finish();
    lineitem.finish();
}

Database gen_tpch_subset(const GenParams& params) {
    Database db;
    gen_tpch_tables(db, params);
    db.seal();
    return db;
}

}  // namespace abr
