#include "ccae/date.hpp"

#include <array>
#include <cstdio>

#include "ccae/errors.hpp"

namespace ccae {

namespace {

bool is_leap(int y) {
    return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
}

// Civil-calendar <-> serial day conversions after Howard Hinnant's
// chrono-compatible algorithms.
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);            // [0, 399]
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1; // [0, 365]
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;           // [0, 146096]
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);         // [0, 146096]
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);         // [0, 365]
    const unsigned mp = (5 * doy + 2) / 153;                              // [0, 11]
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y = static_cast<int>(yy + (m <= 2));
}

} // namespace

int Date::days_in_month(int y, int m) {
    static constexpr std::array<int, 12> lengths = {31, 28, 31, 30, 31, 30,
                                                    31, 31, 30, 31, 30, 31};
    if (m < 1 || m > 12) throw RangeError("month out of range: " + std::to_string(m));
    if (m == 2 && is_leap(y)) return 29;
    return lengths[static_cast<std::size_t>(m - 1)];
}

bool Date::is_valid(int y, int m, int d) {
    if (y < 1 || y > 9999 || m < 1 || m > 12 || d < 1) return false;
    return d <= days_in_month(y, m);
}

Date::Date(int y, int m, int d) : year(y), month(m), day(d) {
    if (!is_valid(y, m, d)) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "invalid date %04d-%02d-%02d", y, m, d);
        throw RangeError(buf);
    }
}

std::int64_t Date::day_number() const {
    return days_from_civil(year, month, day);
}

Date Date::from_day_number(std::int64_t n) {
    int y, m, d;
    civil_from_days(n, y, m, d);
    if (y < 1 || y > 9999) throw RangeError("date arithmetic out of range");
    return Date(y, m, d);
}

Date Date::add_days(std::int64_t n) const {
    return from_day_number(day_number() + n);
}

Date Date::add_months(int n) const {
    const std::int64_t months = static_cast<std::int64_t>(year) * 12 + (month - 1) + n;
    const std::int64_t y = months >= 0 ? months / 12 : (months - 11) / 12;
    const int m = static_cast<int>(months - y * 12) + 1;
    if (y < 1 || y > 9999) throw RangeError("month arithmetic out of range");
    const int d = std::min(day, days_in_month(static_cast<int>(y), m));
    return Date(static_cast<int>(y), m, d);
}

std::string Date::to_string() const {
    char buf[11];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
    return buf;
}

Date Date::parse(const std::string& text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-')
        throw ParseError("expected ISO-8601 date YYYY-MM-DD, got '" + text + "'");
    for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u})
        if (text[i] < '0' || text[i] > '9')
            throw ParseError("expected ISO-8601 date YYYY-MM-DD, got '" + text + "'");
    const int y = std::stoi(text.substr(0, 4));
    const int m = std::stoi(text.substr(5, 2));
    const int d = std::stoi(text.substr(8, 2));
    if (!is_valid(y, m, d)) throw ParseError("invalid calendar date '" + text + "'");
    return Date(y, m, d);
}

std::int64_t days_inclusive(const Date& a, const Date& b) {
    if (b < a) throw RangeError("interval end precedes start");
    return b.day_number() - a.day_number() + 1;
}

} // namespace ccae
