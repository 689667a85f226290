#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tlink {

/// Days since 1994-01-01, the first day covered by the semantic network.
using Day = std::int32_t;

namespace calendar {

inline constexpr std::chrono::year_month_day kEpoch{std::chrono::year{1994}, std::chrono::January,
                                                    std::chrono::day{1}};

inline Day to_day(std::chrono::year_month_day ymd) {
    if (!ymd.ok()) {
        throw std::invalid_argument("invalid calendar date");
    }
    return static_cast<Day>((std::chrono::sys_days{ymd} - std::chrono::sys_days{kEpoch}).count());
}

inline Day to_day(int y, unsigned m, unsigned d) {
    return to_day(std::chrono::year_month_day{std::chrono::year{y}, std::chrono::month{m},
                                              std::chrono::day{d}});
}

inline std::chrono::year_month_day to_date(Day day) {
    return std::chrono::year_month_day{std::chrono::sys_days{kEpoch} + std::chrono::days{day}};
}

/// Same month and day, `years` calendar years earlier. Feb 29 clamps to Feb 28.
inline Day years_before(Day day, int years) {
    auto ymd = to_date(day) - std::chrono::years{years};
    if (!ymd.ok()) {
        ymd = ymd.year() / ymd.month() / std::chrono::last;
    }
    return to_day(ymd);
}

inline std::string format(Day day) {
    const auto ymd = to_date(day);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

/// Accepts "YYYY-MM-DD" or a plain integer day offset.
inline Day parse(std::string_view text) {
    int y = 0;
    unsigned m = 0, d = 0;
    const std::string s{text};
    char tail = 0;
    if (std::sscanf(s.c_str(), "%d-%u-%u%c", &y, &m, &d, &tail) == 3) {
        return to_day(y, m, d);
    }
    std::size_t pos = 0;
    long value = 0;
    try {
        value = std::stol(s, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos == 0 || pos != s.size()) {
        throw std::invalid_argument("cannot parse date '" + s + "' (expected YYYY-MM-DD or day offset)");
    }
    return static_cast<Day>(value);
}

}  // namespace calendar
}  // namespace tlink
