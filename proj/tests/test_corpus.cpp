#include <algorithm>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "recomb/corpus.hpp"
#include "recomb/errors.hpp"
#include "recomb/rng.hpp"

using namespace recomb;
using namespace recomb::corpus;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(std::string name, const std::string& content)
      : path(std::move(name)) {
    std::ofstream out(path, std::ios::binary);
    out << content;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

std::vector<PatentRecord> small_records() {
  std::vector<PatentRecord> records;
  auto add = [&](std::string id, int year, std::string abstract,
                 std::vector<std::string> inventors) {
    PatentRecord r;
    r.patent_id = std::move(id);
    r.filing_date = make_date(year, 6, 1);
    r.abstract = std::move(abstract);
    r.inventor_ids = std::move(inventors);
    r.firm_id = "firm";
    r.ipc = "G06F17/30";
    records.push_back(std::move(r));
  };
  add("A", 1994, "alpha beta gamma", {"i1", "i2"});
  add("B", 1995, "beta gamma delta", {"i2", "i3"});
  add("C", 1996, "alpha delta", {"i1", "i3", "i4"});
  return records;
}

}  // namespace

TEST_CASE("jsonl parsing accepts well-formed lines in file order") {
  TempFile f("t_corpus1.jsonl",
             R"({"id":"X1","date":"2001-05-02","abstract":"laser lens","inventors":["a","b","a"],"firm":"F","ipc":"G06F17/30","cites":["X0"]})"
             "\n\n"
             R"({"id":"X2","date":"2001-05-03","abstract":"more lasers","inventors":["c"],"firm":"G","ipc":"H1","extra_key":7})"
             "\n");
  auto records = parse_patent_file(f.path, FileFormat::jsonl);
  REQUIRE(records.size() == 2);
  CHECK(records[0].patent_id == "X1");
  CHECK(records[0].filing_date == make_date(2001, 5, 2));
  CHECK(records[0].inventor_ids == std::vector<std::string>{"a", "b"});
  CHECK(records[0].cited_ids == std::vector<std::string>{"X0"});
  CHECK(ipc_class_of(records[0]) == "G06");
  CHECK(records[1].cited_ids.empty());
  CHECK(ipc_class_of(records[1]) == "H1");
}

TEST_CASE("jsonl parsing rejects bad input with line numbers") {
  SUBCASE("malformed json") {
    TempFile f("t_corpus2.jsonl", "{\"id\":\"X1\"\nnot json\n");
    CHECK_THROWS_WITH_AS(parse_patent_file(f.path, FileFormat::jsonl),
                         doctest::Contains(":1"), InputError);
  }
  SUBCASE("duplicate id names the id") {
    TempFile f("t_corpus3.jsonl",
               R"({"id":"DUP","date":"2001-01-01","abstract":"x y","inventors":["a"],"firm":"F","ipc":"A"})"
               "\n"
               R"({"id":"DUP","date":"2001-01-02","abstract":"x z","inventors":["b"],"firm":"F","ipc":"A"})"
               "\n");
    CHECK_THROWS_WITH_AS(parse_patent_file(f.path, FileFormat::jsonl),
                         doctest::Contains("DUP"), InputError);
  }
  SUBCASE("bad date") {
    TempFile f("t_corpus4.jsonl",
               R"({"id":"X","date":"2001-02-30","abstract":"x y","inventors":["a"],"firm":"F","ipc":"A"})"
               "\n");
    CHECK_THROWS_AS(parse_patent_file(f.path, FileFormat::jsonl), InputError);
  }
  SUBCASE("empty inventors") {
    TempFile f("t_corpus5.jsonl",
               R"({"id":"X","date":"2001-02-03","abstract":"x y","inventors":[],"firm":"F","ipc":"A"})"
               "\n");
    CHECK_THROWS_WITH_AS(parse_patent_file(f.path, FileFormat::jsonl),
                         doctest::Contains("no inventors"), InputError);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(parse_patent_file("does_not_exist.jsonl", FileFormat::jsonl),
                    InputError);
  }
}

TEST_CASE("empty file parses to an empty sequence") {
  TempFile f("t_corpus6.jsonl", "");
  CHECK(parse_patent_file(f.path, FileFormat::jsonl).empty());
}

TEST_CASE("csv parsing matches the documented header") {
  TempFile f("t_corpus7.csv",
             "id,date,abstract,inventors,firm,ipc,cites\n"
             "X1,2001-05-02,\"laser, lens\",a;b,F,G06F17/30,X0;X9\n");
  auto records = parse_patent_file(f.path, FileFormat::csv);
  REQUIRE(records.size() == 1);
  CHECK(records[0].abstract == "laser, lens");
  CHECK(records[0].inventor_ids == std::vector<std::string>{"a", "b"});
  CHECK(records[0].cited_ids == std::vector<std::string>{"X0", "X9"});

  TempFile bad("t_corpus8.csv", "id,date\nX1,2001-05-02\n");
  CHECK_THROWS_WITH_AS(parse_patent_file(bad.path, FileFormat::csv),
                       doctest::Contains("header"), InputError);
}

TEST_CASE("pair extraction returns distinct unordered pairs") {
  WordTable words;
  PairTable pairs;
  auto abc = extract_word_pairs({"a", "b", "c"}, words, pairs);
  CHECK(abc.size() == 3);
  auto aab = extract_word_pairs({"a", "a", "b"}, words, pairs);
  CHECK(aab.size() == 1);
  CHECK(extract_word_pairs({"a"}, words, pairs).empty());
  CHECK(extract_word_pairs({}, words, pairs).empty());

  // permutation and duplication invariance, and the D(D-1)/2 count
  rng::Stream r(77);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<std::string> tokens;
    const int distinct = 1 + static_cast<int>(r.uniform_int(8));
    for (int d = 0; d < distinct; ++d)
      for (std::uint64_t k = 0; k <= r.uniform_int(3); ++k)
        tokens.push_back("w" + std::to_string(d));
    auto base = extract_word_pairs(tokens, words, pairs);
    CHECK(base.size() == static_cast<std::size_t>(distinct * (distinct - 1)) / 2);
    CHECK(std::is_sorted(base.begin(), base.end()));
    for (int shuffle = 0; shuffle < 3; ++shuffle) {
      for (std::size_t i = tokens.size(); i > 1; --i)
        std::swap(tokens[i - 1], tokens[r.uniform_int(i)]);
      CHECK(extract_word_pairs(tokens, words, pairs) == base);
    }
  }
}

TEST_CASE("pair interning is order-blind and id-stable") {
  WordTable words;
  PairTable pairs;
  const WordId a = words.intern("alpha");
  const WordId b = words.intern("beta");
  CHECK(words.intern("alpha") == a);
  CHECK(words.word(a) == "alpha");
  const PairId ab = pairs.intern(a, b);
  CHECK(pairs.intern(b, a) == ab);
  auto [lo, hi] = pairs.words_of(ab);
  CHECK(lo == std::min(a, b));
  CHECK(hi == std::max(a, b));
  CHECK(words.size() == 2);
  CHECK(pairs.size() == 1);
}

TEST_CASE("corpus build is identical across thread counts") {
  auto c1 = build_corpus(small_records(), StandardizationConfig{}, 1);
  auto c8 = build_corpus(small_records(), StandardizationConfig{}, 8);
  REQUIRE(c1.tokenized.size() == c8.tokenized.size());
  for (std::size_t i = 0; i < c1.tokenized.size(); ++i)
    CHECK(c1.tokenized[i].pairs == c8.tokenized[i].pairs);
  CHECK(c1.words.size() == c8.words.size());
  CHECK(c1.content_digest() == c8.content_digest());
}

TEST_CASE("corpus snapshot round trips") {
  auto c = build_corpus(small_records(), StandardizationConfig{}, 1);
  save_corpus("t_corpus.bin", c);
  auto loaded = load_corpus("t_corpus.bin");
  REQUIRE(loaded.records.size() == c.records.size());
  for (std::size_t i = 0; i < c.records.size(); ++i) {
    CHECK(loaded.records[i].patent_id == c.records[i].patent_id);
    CHECK(loaded.records[i].filing_date == c.records[i].filing_date);
    CHECK(loaded.records[i].inventor_ids == c.records[i].inventor_ids);
    CHECK(loaded.tokenized[i].pairs == c.tokenized[i].pairs);
  }
  CHECK(loaded.content_digest() == c.content_digest());
  for (WordId w = 0; w < c.words.size(); ++w)
    CHECK(loaded.words.word(w) == c.words.word(w));
  std::remove("t_corpus.bin");
  CHECK_THROWS_AS(load_corpus("t_corpus.bin"), InputError);
}

TEST_CASE("content digest ignores record order") {
  auto records = small_records();
  auto c1 = build_corpus(records, StandardizationConfig{}, 1);
  std::reverse(records.begin(), records.end());
  auto c2 = build_corpus(records, StandardizationConfig{}, 1);
  CHECK(c1.content_digest() == c2.content_digest());

  // but not content changes
  records[0].abstract += " extraword here";
  auto c3 = build_corpus(records, StandardizationConfig{}, 1);
  CHECK(c1.content_digest() != c3.content_digest());
}
