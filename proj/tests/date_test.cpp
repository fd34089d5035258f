#include <gtest/gtest.h>

#include "abr/date.hpp"
#include "abr/error.hpp"

using namespace abr;

namespace {

bool leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int month_length(int y, int m) {
    static const int days[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    return m == 2 && leap(y) ? 29 : days[m - 1];
}

}  // namespace

TEST(Date, KnownValues) {
    EXPECT_EQ(parse_date("1970-01-01").days, 0);
    EXPECT_EQ(parse_date("1996-01-01").days, 26 * 365 + 6);
    EXPECT_EQ(parse_date("1996-01-01").days, 9496);
    EXPECT_EQ(parse_date("1969-12-31").days, -1);
    EXPECT_EQ(format_date(Date{9496}), "1996-01-01");
}

// Walks the calendar one day at a time from 1900 to 2100.
TEST(Date, MatchesDayByDayCalendarWalk) {
    int days = 0;
    for (int y = 1970; y > 1900; --y) days -= leap(y - 1) ? 366 : 365;
    for (int y = 1900; y < 2100; ++y) {
        for (int m = 1; m <= 12; ++m) {
            for (int d = 1; d <= month_length(y, m); ++d, ++days) {
                const auto date = date_from_civil(y, static_cast<unsigned>(m), static_cast<unsigned>(d));
                ASSERT_EQ(date.days, days) << y << "-" << m << "-" << d;
                const auto text = format_date(date);
                ASSERT_EQ(parse_date(text).days, days) << text;
            }
        }
    }
}

TEST(Date, RejectsMalformed) {
    for (const char* bad : {"1996-02-30", "1997-02-29", "1900-02-29", "1996-13-01", "1996-00-10", "1996-1-01",
                            "96-01-01", "1996/01/01", "", "1996-01-01x", "abcd-ef-gh", "1996-04-31"}) {
        try {
            parse_date(bad);
            ADD_FAILURE() << "accepted " << bad;
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::MalformedDate) << bad;
        }
    }
    EXPECT_EQ(parse_date("2000-02-29").days, date_from_civil(2000, 2, 29).days);
}
