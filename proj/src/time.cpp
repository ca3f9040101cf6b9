#include "resplab/time.hpp"

#include <cctype>
#include <cstdio>

#include "resplab/error.hpp"

namespace resplab {

namespace chr = std::chrono;

Timestamp now_utc() {
  return chr::time_point_cast<chr::milliseconds>(chr::system_clock::now());
}

std::string format_rfc3339(Timestamp t) {
  const auto day = chr::floor<chr::days>(t);
  const chr::year_month_day ymd{day};
  const chr::hh_mm_ss<chr::milliseconds> tod{t - day};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d.%03dZ",
                static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()), static_cast<int>(tod.hours().count()),
                static_cast<int>(tod.minutes().count()),
                static_cast<int>(tod.seconds().count()),
                static_cast<int>(tod.subseconds().count()));
  return buf;
}

namespace {

class Cursor {
 public:
  explicit Cursor(std::string_view s) : s_(s) {}

  int digits(std::size_t n) {
    int v = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_]))) fail();
      v = v * 10 + (s_[pos_++] - '0');
    }
    return v;
  }

  void expect(char c) {
    if (pos_ >= s_.size() || (s_[pos_] != c && std::toupper(static_cast<unsigned char>(s_[pos_])) != c)) fail();
    ++pos_;
  }

  bool peek(char c) const { return pos_ < s_.size() && s_[pos_] == c; }
  bool at_digit() const {
    return pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]));
  }
  bool done() const { return pos_ == s_.size(); }
  char take() {
    if (pos_ >= s_.size()) fail();
    return s_[pos_++];
  }

  [[noreturn]] void fail() const {
    throw Error(ErrorCode::SchemaViolation, "bad RFC 3339 timestamp '" + std::string(s_) + "'");
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

Timestamp parse_rfc3339(std::string_view text) {
  Cursor c(text);
  const int year = c.digits(4);
  c.expect('-');
  const int month = c.digits(2);
  c.expect('-');
  const int dom = c.digits(2);
  c.expect('T');
  const int hour = c.digits(2);
  c.expect(':');
  const int minute = c.digits(2);
  c.expect(':');
  const int second = c.digits(2);
  int millis = 0;
  if (c.peek('.')) {
    c.take();
    int scale = 100;
    if (!c.at_digit()) c.fail();
    while (c.at_digit()) {
      millis += scale * c.digits(1);
      scale /= 10;
    }
  }
  chr::minutes offset{0};
  const char zone = c.take();
  if (zone == 'Z' || zone == 'z') {
  } else if (zone == '+' || zone == '-') {
    const int oh = c.digits(2);
    c.expect(':');
    const int om = c.digits(2);
    offset = chr::minutes(oh * 60 + om) * (zone == '-' ? -1 : 1);
  } else {
    c.fail();
  }
  if (!c.done()) c.fail();

  const chr::year_month_day ymd{chr::year(year), chr::month(static_cast<unsigned>(month)),
                                chr::day(static_cast<unsigned>(dom))};
  if (!ymd.ok() || hour > 23 || minute > 59 || second > 60) c.fail();
  return Timestamp{chr::sys_days(ymd)} + chr::hours(hour) + chr::minutes(minute) +
         chr::seconds(second) + chr::milliseconds(millis) - offset;
}

}  // namespace resplab
