#pragma once

#include <cstdint>
#include <vector>

#include "abr/storage.hpp"

namespace abr {

struct GenParams {
    double scale_factor = 0.01;
    std::uint64_t seed = 42;
};

TableSchema orders_schema();
TableSchema lineitem_schema();

/// orders row count for a scale factor: round(1.5M * sf).
std::uint32_t orders_rows(double scale_factor);

/// Seeded orders/lineitem subset, sealed. Values are drawn from
/// std::mt19937_64; see the README for the exact mappings.
/// Throws InvalidDescriptor for a non-positive or oversized scale factor.
Database gen_tpch_subset(const GenParams& params);

/// Same tables, added to an unsealed database.
void gen_tpch_tables(Database& db, const GenParams& params);

}  // namespace abr
