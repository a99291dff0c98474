#ifndef CCAE_DATE_HPP
#define CCAE_DATE_HPP

#include <cstdint>
#include <string>

namespace ccae {

/// Proleptic Gregorian calendar date. Day arithmetic uses a serial day
/// number (days since 1970-01-01), so comparisons and differences are exact.
struct Date {
    int year = 1970;
    int month = 1; // 1..12
    int day = 1;   // 1..31

    Date() = default;
    Date(int y, int m, int d);

    static bool is_valid(int y, int m, int d);
    static int days_in_month(int y, int m);

    /// Days since 1970-01-01 (negative before).
    std::int64_t day_number() const;
    static Date from_day_number(std::int64_t n);

    Date add_days(std::int64_t n) const;

    /// Calendar-month addition; day-of-month is clamped to the target
    /// month's length (2013-01-31 + 1 month = 2013-02-28).
    Date add_months(int n) const;

    /// "YYYY-MM-DD"
    std::string to_string() const;
    /// Parses strict ISO-8601 "YYYY-MM-DD"; throws ParseError otherwise.
    static Date parse(const std::string& text);

    friend bool operator==(const Date& a, const Date& b) {
        return a.year == b.year && a.month == b.month && a.day == b.day;
    }
    friend bool operator!=(const Date& a, const Date& b) { return !(a == b); }
    friend bool operator<(const Date& a, const Date& b) {
        return a.day_number() < b.day_number();
    }
    friend bool operator<=(const Date& a, const Date& b) { return !(b < a); }
    friend bool operator>(const Date& a, const Date& b) { return b < a; }
    friend bool operator>=(const Date& a, const Date& b) { return !(a < b); }
};

/// Inclusive number of calendar days in [a, b]; throws RangeError if b < a.
std::int64_t days_inclusive(const Date& a, const Date& b);

} // namespace ccae

#endif
