#include "recapit/time.hpp"

#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>

namespace recapit {

namespace {

struct Cursor {
    std::string_view s;
    std::size_t i = 0;

    bool done() const { return i >= s.size(); }
    char peek() const { return done() ? '\0' : s[i]; }
    bool accept(char c) {
        if (peek() == c) {
            ++i;
            return true;
        }
        return false;
    }
    std::optional<int> digits(std::size_t count) {
        if (i + count > s.size()) return std::nullopt;
        int v = 0;
        for (std::size_t k = 0; k < count; ++k) {
            const char c = s[i + k];
            if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
            v = v * 10 + (c - '0');
        }
        i += count;
        return v;
    }
};

}  // namespace

std::optional<double> parse_iso8601(std::string_view text) {
    using namespace std::chrono;
    Cursor c{text};
    auto year = c.digits(4);
    if (!year) return std::nullopt;
    const bool extended = c.accept('-');
    auto month = c.digits(2);
    if (!month) return std::nullopt;
    if (extended && !c.accept('-')) return std::nullopt;
    auto day = c.digits(2);
    if (!day) return std::nullopt;
    if (!c.accept('T') && !c.accept('t')) return std::nullopt;
    auto hour = c.digits(2);
    if (!hour) return std::nullopt;
    if (extended && !c.accept(':')) return std::nullopt;
    auto minute = c.digits(2);
    if (!minute) return std::nullopt;
    if (extended && !c.accept(':')) return std::nullopt;
    auto second = c.digits(2);
    if (!second) return std::nullopt;

    double fraction = 0.0;
    if (c.accept('.') || c.accept(',')) {
        double scale = 0.1;
        bool any = false;
        while (!c.done() && std::isdigit(static_cast<unsigned char>(c.peek()))) {
            fraction += scale * (c.peek() - '0');
            scale *= 0.1;
            ++c.i;
            any = true;
        }
        if (!any) return std::nullopt;
    }

    int zone_offset = 0;
    if (c.accept('Z') || c.accept('z')) {
    } else if (c.peek() == '+' || c.peek() == '-') {
        const int sign = c.peek() == '-' ? -1 : 1;
        ++c.i;
        auto zh = c.digits(2);
        if (!zh) return std::nullopt;
        c.accept(':');
        auto zm = c.digits(2);
        if (!zm) return std::nullopt;
        zone_offset = sign * (*zh * 3600 + *zm * 60);
    }
    if (!c.done()) return std::nullopt;

    const year_month_day ymd{std::chrono::year{*year}, std::chrono::month{static_cast<unsigned>(*month)},
                             std::chrono::day{static_cast<unsigned>(*day)}};
    if (!ymd.ok() || *hour > 23 || *minute > 59 || *second > 60) return std::nullopt;
    const auto days = sys_days{ymd}.time_since_epoch().count();
    const double seconds = static_cast<double>(days) * 86400.0 + *hour * 3600.0 + *minute * 60.0 +
                           *second - zone_offset;
    return seconds + fraction;
}

std::string format_iso8601(double epoch_seconds) {
    using namespace std::chrono;
    const auto whole = static_cast<long long>(std::floor(epoch_seconds));
    const sys_seconds tp{seconds{whole}};
    const auto day_point = floor<days>(tp);
    const year_month_day ymd{day_point};
    const hh_mm_ss hms{tp - day_point};
    char buf[96];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02lld:%02lld:%02lldZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<long long>(hms.hours().count()), static_cast<long long>(hms.minutes().count()),
                  static_cast<long long>(hms.seconds().count()));
    return buf;
}

std::string format_clock(double seconds) {
    const auto total = static_cast<long long>(std::llround(std::max(0.0, seconds)));
    char buf[32];
    if (total >= 3600) {
        std::snprintf(buf, sizeof buf, "%lld:%02lld:%02lld", total / 3600, (total / 60) % 60, total % 60);
    } else {
        std::snprintf(buf, sizeof buf, "%02lld:%02lld", total / 60, total % 60);
    }
    return buf;
}

}  // namespace recapit
