#include "osim/time_utils.hpp"

#include <cctype>
#include <cstdio>

namespace osim {

namespace {

// Days since 1970-01-01 for a civil date (Howard Hinnant's algorithm).
int64_t days_from_civil(int64_t y, int m, int d) {
    y -= m <= 2;
    const int64_t era = (y >= 0 ? y : y - 399) / 400;
    const auto yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2) / 5 + static_cast<unsigned>(d) - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<int64_t>(doe) - 719468;
}

void civil_from_days(int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const auto doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const int64_t yy = static_cast<int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp < 10 ? mp + 3 : mp - 9);
    y = static_cast<int>(yy + (m <= 2));
}

bool days_in_month_ok(int y, int m, int d) {
    static const int dim[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m < 1 || m > 12 || d < 1) return false;
    int max_d = dim[m - 1];
    if (m == 2 && ((y % 4 == 0 && y % 100 != 0) || y % 400 == 0)) max_d = 29;
    return d <= max_d;
}

} // namespace

std::optional<int64_t> parse_iso8601(const std::string& text) {
    const char* s = text.c_str();
    int y, mo, d, h, mi, sec;
    int n = 0;
    if (std::sscanf(s, "%4d-%2d-%2d%n", &y, &mo, &d, &n) != 3 || n != 10) return std::nullopt;
    if (!days_in_month_ok(y, mo, d)) return std::nullopt;
    const char* p = s + 10;
    h = mi = sec = 0;
    if (*p == 'T' || *p == 't' || *p == ' ') {
        ++p;
        if (std::sscanf(p, "%2d:%2d:%2d%n", &h, &mi, &sec, &n) != 3 || n != 8) return std::nullopt;
        p += 8;
        if (h > 23 || mi > 59 || sec > 60) return std::nullopt;
        if (sec == 60) sec = 59; // leap seconds clamp
        if (*p == '.') {
            ++p;
            if (!std::isdigit(static_cast<unsigned char>(*p))) return std::nullopt;
            while (std::isdigit(static_cast<unsigned char>(*p))) ++p;
        }
    }
    int64_t offset = 0;
    if (*p == 'Z' || *p == 'z') {
        ++p;
    } else if (*p == '+' || *p == '-') {
        const int sign = (*p == '+') ? 1 : -1;
        ++p;
        int oh, om;
        if (std::sscanf(p, "%2d:%2d%n", &oh, &om, &n) == 2 && n == 5) {
            p += 5;
        } else if (std::sscanf(p, "%2d%2d%n", &oh, &om, &n) == 2 && n == 4) {
            p += 4;
        } else {
            return std::nullopt;
        }
        if (oh > 23 || om > 59) return std::nullopt;
        offset = sign * (oh * 3600LL + om * 60LL);
    }
    if (*p != '\0') return std::nullopt;
    const int64_t days = days_from_civil(y, mo, d);
    return days * 86400 + h * 3600 + mi * 60 + sec - offset;
}

std::string format_iso8601(int64_t epoch_seconds) {
    int64_t days = epoch_seconds / 86400;
    int64_t rem = epoch_seconds % 86400;
    if (rem < 0) {
        rem += 86400;
        days -= 1;
    }
    int y, m, d;
    civil_from_days(days, y, m, d);
    const int h = static_cast<int>(rem / 3600);
    const int mi = static_cast<int>((rem % 3600) / 60);
    const int s = static_cast<int>(rem % 60);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", y, m, d, h, mi, s);
    return buf;
}

} // namespace osim
