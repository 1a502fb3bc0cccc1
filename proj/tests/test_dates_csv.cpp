#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "recomb/csv.hpp"
#include "recomb/dates.hpp"
#include "recomb/errors.hpp"
#include "recomb/rng.hpp"

using namespace recomb;

TEST_CASE("date round trip and ordering") {
  CHECK(make_date(1970, 1, 1).days == 0);
  CHECK(make_date(1970, 1, 2).days == 1);
  CHECK(make_date(1969, 12, 31).days == -1);
  CHECK(make_date(2000, 3, 1).days - make_date(2000, 2, 28).days == 2);
  CHECK(make_date(2001, 3, 1).days - make_date(2001, 2, 28).days == 1);

  rng::Stream r(11);
  for (int i = 0; i < 2000; ++i) {
    Date d{static_cast<std::int32_t>(r.uniform_int(200000)) - 40000};
    CHECK(parse_date(format_date(d)) == d);
    const CivilDate c = to_civil(d);
    CHECK(make_date(c.year, c.month, c.day) == d);
  }
}

TEST_CASE("date parsing is strict") {
  CHECK(parse_date("1994-01-31") == make_date(1994, 1, 31));
  CHECK_THROWS_AS(parse_date("2021-02-30"), InputError);
  CHECK_THROWS_AS(parse_date("2021-13-01"), InputError);
  CHECK_THROWS_AS(parse_date("2021-00-10"), InputError);
  CHECK_THROWS_AS(parse_date("21-01-01"), InputError);
  CHECK_THROWS_AS(parse_date("2021/01/01"), InputError);
  CHECK_THROWS_AS(parse_date("2021-1-01"), InputError);
  CHECK_THROWS_AS(parse_date(""), InputError);
  CHECK_THROWS_AS(parse_date("2021-01-011"), InputError);
}

TEST_CASE("year arithmetic clamps leap days") {
  CHECK(add_years(make_date(2000, 2, 29), 1) == make_date(2001, 2, 28));
  CHECK(add_years(make_date(2000, 2, 29), 4) == make_date(2004, 2, 29));
  CHECK(add_years(make_date(2010, 6, 15), 5) == make_date(2015, 6, 15));
  CHECK(year_of(make_date(1999, 12, 31)) == 1999);
  CHECK(year_of(make_date(2000, 1, 1)) == 2000);
}

TEST_CASE("shortest round-trip double formatting") {
  CHECK(format_double(0.0) == "0");
  CHECK(format_double(1.5) == "1.5");
  CHECK(format_double(0.1) == "0.1");
  rng::Stream r(12);
  for (int i = 0; i < 5000; ++i) {
    double v = (r.uniform01() - 0.5) * std::pow(10.0, r.uniform_int(20));
    CHECK(std::stod(format_double(v)) == v);
  }
}

TEST_CASE("csv escaping and reading round trip") {
  const std::string path = "test_roundtrip.csv";
  {
    std::ofstream out(path, std::ios::binary);
    out << "# a comment line\n";
    write_csv_row(out, {"plain", "with,comma", "with\"quote", "multi\nline",
                        "", "trailing "});
    write_csv_row(out, {"second", "row", "x", "y", "z", "w"});
  }
  CsvReader reader(path);
  auto row1 = reader.next();
  REQUIRE(row1.has_value());
  CHECK(*row1 == std::vector<std::string>{"plain", "with,comma", "with\"quote",
                                          "multi\nline", "", "trailing "});
  auto row2 = reader.next();
  REQUIRE(row2.has_value());
  CHECK((*row2)[0] == "second");
  CHECK_FALSE(reader.next().has_value());
  std::remove(path.c_str());
}

TEST_CASE("csv reader skips comments and reports line numbers") {
  const std::string path = "test_lines.csv";
  {
    std::ofstream out(path, std::ios::binary);
    out << "# header comment\na,b\n# interior comment\nc,d\n";
  }
  CsvReader reader(path);
  auto r1 = reader.next();
  REQUIRE(r1.has_value());
  CHECK(reader.line() == 2);
  auto r2 = reader.next();
  REQUIRE(r2.has_value());
  CHECK(reader.line() == 4);
  CHECK((*r2)[1] == "d");
  std::remove(path.c_str());
}

TEST_CASE("semicolon lists split and join") {
  CHECK(split_list("a;b;c") == std::vector<std::string>{"a", "b", "c"});
  CHECK(split_list("").empty());
  CHECK(split_list("solo") == std::vector<std::string>{"solo"});
  CHECK(join_list({"a", "b", "c"}) == "a;b;c");
  CHECK(join_list({}) == "");
}
