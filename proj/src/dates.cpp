#include "recomb/dates.hpp"

#include <array>
#include <charconv>

#include "recomb/errors.hpp"

namespace recomb {

namespace {

// Days-from-civil / civil-from-days after Howard Hinnant's algorithms.
std::int32_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const int era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<int>(doe) - 719468;
}

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
  static constexpr std::array<int, 12> k = {31, 28, 31, 30, 31, 30,
                                            31, 31, 30, 31, 30, 31};
  if (m == 2 && is_leap(y)) return 29;
  return k[m - 1];
}

}  // namespace

Date make_date(int year, int month, int day) {
  return Date{days_from_civil(year, month, day)};
}

CivilDate to_civil(Date date) {
  std::int32_t z = date.days + 719468;
  const int era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const int y = static_cast<int>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const int d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  const int m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
  return CivilDate{y + (m <= 2), m, d};
}

Date parse_date(std::string_view text) {
  auto fail = [&] {
    throw InputError("unparseable date: '" + std::string(text) +
                     "' (expected YYYY-MM-DD)");
  };
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') fail();
  int y = 0, m = 0, d = 0;
  auto num = [&](std::size_t pos, std::size_t len, int& out) {
    const char* b = text.data() + pos;
    auto [p, ec] = std::from_chars(b, b + len, out);
    if (ec != std::errc{} || p != b + len) fail();
  };
  num(0, 4, y);
  num(5, 2, m);
  num(8, 2, d);
  if (m < 1 || m > 12 || d < 1 || d > days_in_month(y, m)) fail();
  return make_date(y, m, d);
}

std::string format_date(Date date) {
  CivilDate c = to_civil(date);
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", c.year, c.month, c.day);
  return std::string(buf);
}

Date add_years(Date date, int years) {
  CivilDate c = to_civil(date);
  int y = c.year + years;
  int d = c.day;
  if (c.month == 2 && d == 29 && !is_leap(y)) d = 28;
  return make_date(y, c.month, d);
}

}  // namespace recomb
