#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace recomb {

// Calendar date stored as days since 1970-01-01 (proleptic Gregorian).
// Day granularity is the finest resolution used anywhere in the project.
struct Date {
  std::int32_t days = 0;

  friend auto operator<=>(const Date&, const Date&) = default;
};

// Converts y/m/d to days since epoch. Valid for any Gregorian date.
Date make_date(int year, int month, int day);

struct CivilDate {
  int year;
  int month;
  int day;
};

CivilDate to_civil(Date d);

inline int year_of(Date d) { return to_civil(d).year; }

// Parses strict "YYYY-MM-DD". Throws InputError on anything else,
// including impossible dates like 2021-02-30.
Date parse_date(std::string_view text);

std::string format_date(Date d);

// d shifted by `years` calendar years; Feb 29 clamps to Feb 28.
Date add_years(Date d, int years);

}  // namespace recomb
