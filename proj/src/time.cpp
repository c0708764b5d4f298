#include "ofnet/time.hpp"

#include <cctype>
#include <cstdio>
#include <limits>

#include "ofnet/error.hpp"

namespace ofnet {

std::uint32_t to_apple_seconds(TimePoint t) {
    auto secs = std::chrono::floor<Seconds>(t).time_since_epoch().count() - kAppleEpochUnixSeconds;
    if (secs < 0 || secs > std::numeric_limits<std::uint32_t>::max()) {
        throw RangeError("time outside the 32-bit report timestamp range");
    }
    return static_cast<std::uint32_t>(secs);
}

TimePoint from_apple_seconds(std::uint32_t s) {
    return TimePoint{Seconds{kAppleEpochUnixSeconds + static_cast<std::int64_t>(s)}};
}

std::string format_iso8601(TimePoint t) {
    using namespace std::chrono;
    auto day = floor<days>(t);
    year_month_day ymd{day};
    auto ms_of_day = (t - day).count();
    char buf[64];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02lld:%02lld:%02lld.%03lldZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<long long>(ms_of_day / 3600000), static_cast<long long>(ms_of_day / 60000 % 60),
                  static_cast<long long>(ms_of_day / 1000 % 60), static_cast<long long>(ms_of_day % 1000));
    return buf;
}

namespace {

class Cursor {
public:
    explicit Cursor(std::string_view s) : s_(s) {}

    bool done() const { return pos_ >= s_.size(); }
    char peek() const { return done() ? '\0' : s_[pos_]; }
    void expect(char c) {
        if (peek() != c) fail();
        ++pos_;
    }
    int digits(std::size_t n) {
        int v = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!std::isdigit(static_cast<unsigned char>(peek()))) fail();
            v = v * 10 + (s_[pos_++] - '0');
        }
        return v;
    }
    [[noreturn]] void fail() const { throw FormatError("invalid ISO-8601 timestamp '" + std::string(s_) + "'"); }
    std::size_t& pos() { return pos_; }

private:
    std::string_view s_;
    std::size_t pos_ = 0;
};

}  // namespace

TimePoint parse_iso8601(std::string_view text) {
    using namespace std::chrono;
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);

    Cursor c(text);
    int y = c.digits(4);
    c.expect('-');
    int mo = c.digits(2);
    c.expect('-');
    int d = c.digits(2);
    year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) c.fail();
    std::int64_t ms = 0;
    if (!c.done()) {
        if (c.peek() != 'T' && c.peek() != ' ') c.fail();
        ++c.pos();
        int hh = c.digits(2);
        c.expect(':');
        int mm = c.digits(2);
        c.expect(':');
        int ss = c.digits(2);
        if (hh > 23 || mm > 59 || ss > 60) c.fail();
        ms = ((hh * 60LL + mm) * 60 + ss) * 1000;
        if (c.peek() == '.') {
            ++c.pos();
            int scale = 100;
            bool any = false;
            while (std::isdigit(static_cast<unsigned char>(c.peek()))) {
                ms += (c.peek() - '0') * scale;
                scale /= 10;
                ++c.pos();
                any = true;
            }
            if (!any) c.fail();
        }
        if (c.peek() == 'Z') {
            ++c.pos();
        } else if (c.peek() == '+' || c.peek() == '-') {
            int sign = c.peek() == '+' ? 1 : -1;
            ++c.pos();
            int oh = c.digits(2);
            if (c.peek() == ':') ++c.pos();
            int om = c.digits(2);
            ms -= sign * (oh * 60LL + om) * 60000;
        }
        if (!c.done()) c.fail();
    }
    return TimePoint{sys_days{ymd}} + Milliseconds{ms};
}

}  // namespace ofnet
