#include <cmath>
#include <filesystem>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "abr/date.hpp"
#include "abr/error.hpp"
#include "abr/tbl.hpp"
#include "abr/tpch.hpp"

using namespace abr;

namespace {

const TableSchema kMixed{"m", {{"k", ColumnType::Int32}, {"p", ColumnType::Float64}, {"d", ColumnType::Date32}}};

Error load_error(const std::string& text, const TableSchema& schema = kMixed) {
    Database db;
    std::istringstream in(text);
    try {
        load_tbl(db, schema, in);
    } catch (const Error& e) {
        EXPECT_FALSE(db.has_table(schema.name));
        return e;
    }
    ADD_FAILURE() << "load succeeded";
    return Error(ErrorCode::IoError, "");
}

}  // namespace

TEST(Tbl, ParsesTypedFields) {
    Database db;
    std::istringstream in("1|149.99|1996-01-01|\n");
    EXPECT_EQ(load_tbl(db, kMixed, in), 1u);
    db.seal();
    EXPECT_EQ(db.int32_view("m", "k")[0], 1);
    EXPECT_EQ(db.float64_view("m", "p")[0], 149.99);
    EXPECT_EQ(db.date_view("m", "d")[0], 9496);
}

TEST(Tbl, LineEndingVariants) {
    Database db;
    std::istringstream in("1|2.5|1970-01-02|\r\n-3|0|1969-12-31\n");
    EXPECT_EQ(load_tbl(db, kMixed, in), 2u);
    db.seal();
    EXPECT_EQ(db.int32_view("m", "k")[1], -3);
    EXPECT_EQ(db.date_view("m", "d")[0], 1);
    EXPECT_EQ(db.date_view("m", "d")[1], -1);
}

TEST(Tbl, EmptyInputCreatesEmptyTable) {
    Database db;
    std::istringstream in("");
    EXPECT_EQ(load_tbl(db, kMixed, in), 0u);
    db.seal();
    EXPECT_TRUE(db.has_table("m"));
    EXPECT_EQ(db.row_count("m"), 0u);
}

TEST(Tbl, Errors) {
    auto e = load_error("1|2.0|1996-01-01|\n1|2.0|\n");
    EXPECT_EQ(e.code(), ErrorCode::FieldCountMismatch);
    EXPECT_EQ(e.line(), 2u);
    e = load_error("1|2.0|1996-01-01|extra|\n");
    EXPECT_EQ(e.code(), ErrorCode::FieldCountMismatch);
    e = load_error("1|2.0|1996-01-01|\n2|abc|1996-01-01|\n");
    EXPECT_EQ(e.code(), ErrorCode::ConversionError);
    EXPECT_EQ(e.line(), 2u);
    EXPECT_EQ(e.column(), "p");
    e = load_error("9999999999|1|1996-01-01|\n");
    EXPECT_EQ(e.code(), ErrorCode::ConversionError);
    EXPECT_EQ(e.column(), "k");
    e = load_error("1|1|1996-02-30|\n");
    EXPECT_EQ(e.code(), ErrorCode::ConversionError);
    EXPECT_EQ(e.column(), "d");
    Database db;
    EXPECT_THROW(load_tbl(db, kMixed, std::filesystem::path("/nonexistent/x.tbl")), Error);
}

TEST(Tbl, StringsAndRoundTrip) {
    const TableSchema schema{"s", {{"t", ColumnType::String}, {"p", ColumnType::Float64}}};
    Database db;
    std::istringstream in("hello world|0.1|\n|1e300|\nx|-0|\n");
    load_tbl(db, schema, in);
    db.seal();
    EXPECT_EQ(db.string_at("s", "t", 0), "hello world");
    EXPECT_EQ(db.string_at("s", "t", 1), "");
    std::ostringstream out;
    emit_tbl(db, "s", out);
    Database again;
    std::istringstream back(out.str());
    load_tbl(again, schema, back);
    again.seal();
    EXPECT_EQ(again.arena_digest(), db.arena_digest());
    EXPECT_TRUE(std::signbit(again.float64_view("s", "p")[2]));
}

TEST(Tbl, SchemaJson) {
    const auto j = schema_to_json(orders_schema());
    EXPECT_EQ(j["name"], "orders");
    EXPECT_EQ(j["columns"][1]["type"], "DATE32");
    EXPECT_EQ(schema_from_json(j), orders_schema());
    EXPECT_THROW(schema_from_json(nlohmann::json{{"name", "x"}}), Error);
    EXPECT_THROW(schema_from_json(nlohmann::json::parse(R"({"name":"x","columns":[{"name":"a","type":"BLOB"}]})")),
                 Error);
}

TEST(Generator, RowCounts) {
    EXPECT_EQ(orders_rows(0.001), 1500u);
    EXPECT_EQ(orders_rows(0.01), 15000u);
    EXPECT_THROW(orders_rows(0), Error);
    EXPECT_THROW(orders_rows(-1), Error);
    const auto db = gen_tpch_subset({0.001, 7});
    EXPECT_EQ(db.row_count("orders"), 1500u);
    EXPECT_GE(db.row_count("lineitem"), 1500u);
    EXPECT_LE(db.row_count("lineitem"), 10500u);
}

TEST(Generator, MeanLinesPerOrderNearFour) {
    double total = 0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto db = gen_tpch_subset({0.001, seed});
        total += static_cast<double>(db.row_count("lineitem")) / db.row_count("orders");
    }
    EXPECT_NEAR(total / 5, 4.0, 0.1);
}

TEST(Generator, DeterministicPerSeed) {
    EXPECT_EQ(gen_tpch_subset({0.001, 42}).arena_digest(), gen_tpch_subset({0.001, 42}).arena_digest());
    EXPECT_NE(gen_tpch_subset({0.001, 42}).arena_digest(), gen_tpch_subset({0.001, 43}).arena_digest());
}

TEST(Generator, ValueDomains) {
    const auto db = gen_tpch_subset({0.001, 3});
    const auto okeys = db.int32_view("orders", "o_orderkey");
    const std::set<std::int32_t> keys(okeys.begin(), okeys.end());
    EXPECT_EQ(keys.size(), okeys.size());
    for (auto k : db.int32_view("lineitem", "l_orderkey")) ASSERT_TRUE(keys.count(k));
    const auto lo = parse_date("1992-01-01").days, hi = parse_date("1998-08-02").days;
    for (auto d : db.date_view("orders", "o_orderdate")) ASSERT_TRUE(d >= lo && d <= hi);
    for (auto p : db.int32_view("orders", "o_shippriority")) ASSERT_EQ(p, 0);
    for (auto p : db.float64_view("orders", "o_totalprice")) ASSERT_TRUE(p >= 850.0 && p <= 555000.0);
    for (auto p : db.float64_view("lineitem", "l_extendedprice")) ASSERT_TRUE(p >= 900.0 && p <= 105000.0);
    for (auto d : db.float64_view("lineitem", "l_discount")) {
        ASSERT_TRUE(d >= 0.0 && d <= 0.10);
        ASSERT_EQ(std::round(d * 100) / 100, d);
    }
}

TEST(Generator, TblRoundTripIsExact) {
    const auto db = gen_tpch_subset({0.001, 42});
    Database loaded;
    for (const auto& schema : db.schemas()) {
        std::stringstream buf;
        emit_tbl(db, schema.name, buf);
        load_tbl(loaded, schema, buf);
    }
    loaded.seal();
    EXPECT_EQ(loaded.arena_digest(), db.arena_digest());
}
