#pragma once

#include <string>
#include <vector>

#include "abr/date.hpp"
#include "abr/storage.hpp"
#include "abr/tpch.hpp"

namespace abr::testing {

struct OrderRow {
    std::int32_t key;
    std::string date;
    double price;
    std::int32_t priority = 0;
};

struct LineRow {
    std::int32_t key;
    double price;
    double discount = 0.0;
};

/// Sealed database with the orders/lineitem subset schemas.
inline Database tpch_fixture(const std::vector<OrderRow>& orders, const std::vector<LineRow>& lines) {
    Database db;
    {
        auto b = db.begin_table(orders_schema());
        for (const auto& o : orders) {
            b.append_int32(0, o.key);
            b.append_date(1, parse_date(o.date));
            b.append_float64(2, o.price);
            b.append_int32(3, o.priority);
        }
        b.finish();
    }
    {
        auto b = db.begin_table(lineitem_schema());
        for (const auto& l : lines) {
            b.append_int32(0, l.key);
            b.append_float64(1, l.price);
            b.append_float64(2, l.discount);
        }
        b.finish();
    }
    db.seal();
    return db;
}

/// Orders with the given prices; keys 1..n, all on 1996-01-01.
inline Database orders_with_prices(const std::vector<double>& prices) {
    std::vector<OrderRow> rows;
    for (std::size_t i = 0; i < prices.size(); ++i) {
        rows.push_back({static_cast<std::int32_t>(i + 1), "1996-01-01", prices[i], 0});
    }
    return tpch_fixture(rows, {});
}

/// Five orders, eight lines. January 1996 orders are 1, 2 (both on the
/// 6th) and 3; order 4 and 5 fall outside the month, line key 9 has no order.
///   order  sum(price)  sum(price * (1 - discount))
///   1      150         90 + 50 = 140
///   2      200         100
///   3      120         60 + 40 = 100
inline Database tiny_join_fixture() {
    return tpch_fixture(
        {
            {1, "1996-01-06", 10.0},
            {2, "1996-01-06", 20.0},
            {3, "1996-01-15", 30.0},
            {4, "1995-12-31", 40.0},
            {5, "1996-02-01", 50.0},
        },
        {
            {1, 100.0, 0.1},
            {1, 50.0, 0.0},
            {2, 200.0, 0.5},
            {3, 80.0, 0.25},
            {3, 40.0, 0.0},
            {4, 1000.0, 0.0},
            {5, 500.0, 0.0},
            {9, 7.0, 0.0},
        });
}

}  // namespace abr::testing
