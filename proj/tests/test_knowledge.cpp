#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "recomb/corpus.hpp"
#include "recomb/errors.hpp"
#include "recomb/knowledge.hpp"
#include "recomb/novelty.hpp"

using namespace recomb;
using corpus::PairId;
using knowledge::compute_differentiation;
using knowledge::PairConvention;
using novelty::NoveltyIndex;
using oracles::RawPatent;

namespace {

const Date t0 = make_date(2005, 1, 1);

// An index where every listed pair has novelty exactly `weight` at t0:
// impossible to build from real records for arbitrary weights, so tests that
// need uniform weights use a single-date corpus where all n_wt are equal.
NoveltyIndex uniform_index(int universe, int patents_per_pair = 1) {
  std::vector<RawPatent> corpus;
  for (int rep = 0; rep < patents_per_pair; ++rep) {
    RawPatent p;
    p.id = "U" + std::to_string(rep);
    p.date = t0;
    for (int w = 0; w < universe; ++w)
      p.pairs.push_back(static_cast<PairId>(w));
    corpus.push_back(std::move(p));
  }
  return NoveltyIndex::build(oracles::as_inputs(corpus), universe);
}

double diff_s(const NoveltyIndex& index, std::vector<PairId> a,
              std::vector<PairId> b, Date t = t0) {
  return compute_differentiation(index, a, b, t).s;
}

}  // namespace

TEST_CASE("differentiation matches the hand examples") {
  auto index = uniform_index(6);
  // identical sets
  CHECK(diff_s(index, {0, 1, 2}, {0, 1, 2}) == 0.0);
  // disjoint equal mass
  CHECK(diff_s(index, {0, 1}, {2, 3}) == 0.5);
  // {ab,bc} vs {bc,cd} with unit weights: sqrt(1*1)/3
  CHECK(diff_s(index, {0, 1}, {1, 2}) == doctest::Approx(1.0 / 3).epsilon(1e-15));
  // one side empty: zero but not flagged
  const std::vector<PairId> two = {0, 1};
  const std::vector<PairId> none;
  auto one_empty = compute_differentiation(index, two, none, t0);
  CHECK(one_empty.s == 0.0);
  CHECK_FALSE(one_empty.both_empty);
  // both empty: flagged zero; the checked front end throws instead
  auto both = compute_differentiation(index, none, none, t0);
  CHECK(both.s == 0.0);
  CHECK(both.both_empty);
  knowledge::KnowledgeSet empty_i, empty_j;
  empty_i.as_of = empty_j.as_of = t0;
  CHECK_THROWS_AS(knowledge::pair_differentiation(index, empty_i, empty_j, t0),
                  ComputeError);
}

TEST_CASE("differentiation bounds, symmetry, nesting, and scale invariance") {
  rng::Stream r(701);
  // Weights vary across pairs because later patents shift T/df unevenly.
  auto corpus = oracles::random_corpus(r, 50, 8);
  auto index = NoveltyIndex::build(oracles::as_inputs(corpus),
                                   oracles::universe_of(corpus));
  // Scaled replica: same pair pattern, every patent duplicated k times on
  // the same dates multiplies T by k while df scales equally, leaving the
  // RATIOS n_wt different; instead scale by querying a later date after
  // appending pair-free patents, which multiplies T only. True uniform
  // scaling of all n_wt is exercised via the uniform index below.
  const Date t = corpus.back().date;
  const std::size_t universe = oracles::universe_of(corpus);

  auto seen_at = [&](Date when) {
    std::set<PairId> seen;
    for (const auto& p : corpus)
      if (p.date <= when)
        for (auto w : p.pairs) seen.insert(w);
    return seen;
  };
  const auto seen = seen_at(t);

  for (int rep = 0; rep < 2000; ++rep) {
    std::vector<PairId> a, b;
    for (PairId w : seen) {
      if (r.uniform_int(3) == 0) a.push_back(w);
      if (r.uniform_int(3) == 0) b.push_back(w);
    }
    if (a.empty() && b.empty()) continue;
    const double s_ab = diff_s(index, a, b, t);
    const double s_ba = diff_s(index, b, a, t);
    REQUIRE(s_ab == s_ba);
    REQUIRE(s_ab >= 0.0);
    REQUIRE(s_ab <= 0.5);
    const bool nested =
        std::includes(a.begin(), a.end(), b.begin(), b.end()) ||
        std::includes(b.begin(), b.end(), a.begin(), a.end());
    if (nested)
      REQUIRE(s_ab == 0.0);
    else
      REQUIRE(s_ab > 0.0);
  }
  (void)universe;

  // Uniform scaling: a one-patent index with universe U gives every pair
  // weight exactly U, so U=10 vs U=30 scales all weights by 3. Query sets
  // drawn from ids 0..9 exist in both.
  auto base = uniform_index(10);
  auto scaled = uniform_index(30);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<PairId> a, b;
    for (PairId w = 0; w < 10; ++w) {
      if (r.uniform_int(3) == 0) a.push_back(w);
      if (r.uniform_int(3) == 0) b.push_back(w);
    }
    if (a.empty() && b.empty()) continue;
    CHECK(diff_s(base, a, b) ==
          doctest::Approx(diff_s(scaled, a, b)).epsilon(1e-14));
  }
}

TEST_CASE("inventor knowledge accumulates the strict past") {
  std::vector<corpus::PatentRecord> records;
  auto add = [&](std::string id, Date d, std::string abstract,
                 std::vector<std::string> inventors) {
    corpus::PatentRecord rec;
    rec.patent_id = std::move(id);
    rec.filing_date = d;
    rec.abstract = std::move(abstract);
    rec.inventor_ids = std::move(inventors);
    rec.firm_id = "F";
    rec.ipc = "G06F";
    records.push_back(std::move(rec));
  };
  const Date d1 = make_date(2001, 1, 1);
  const Date d2 = make_date(2002, 1, 1);
  const Date d3 = make_date(2003, 1, 1);
  add("P1", d1, "alpha beta gamma", {"i"});
  add("P2", d2, "beta delta", {"i", "j"});
  auto built = corpus::build_corpus(std::move(records),
                                    corpus::StandardizationConfig{}, 1);

  // single union, strict boundary, union of two records, unknown inventor
  CHECK(knowledge::inventor_knowledge(built, "i", d2).pairs ==
        built.tokenized[0].pairs);
  CHECK(knowledge::inventor_knowledge(built, "i", d1).pairs.empty());
  auto at3 = knowledge::inventor_knowledge(built, "i", d3).pairs;
  std::vector<PairId> expect;
  std::set_union(built.tokenized[0].pairs.begin(), built.tokenized[0].pairs.end(),
                 built.tokenized[1].pairs.begin(), built.tokenized[1].pairs.end(),
                 std::back_inserter(expect));
  CHECK(at3 == expect);
  CHECK(knowledge::inventor_knowledge(built, "nobody", d3).pairs.empty());
  CHECK(knowledge::inventor_knowledge(built, "j", d2).pairs.empty());
}

TEST_CASE("nesting witness finds chains and counterexamples") {
  // {a} <= {a,b} <= {a,b,c}, shuffled
  std::vector<std::vector<PairId>> chain = {{0, 1, 2}, {0}, {0, 1}};
  auto res = knowledge::nesting_witness(chain);
  REQUIRE(res.ok);
  REQUIRE(res.order.size() == 3);
  for (std::size_t k = 1; k < res.order.size(); ++k) {
    const auto& small = chain[res.order[k - 1]];
    const auto& big = chain[res.order[k]];
    CHECK(std::includes(big.begin(), big.end(), small.begin(), small.end()));
  }

  auto bad = knowledge::nesting_witness({{0}, {1}});
  CHECK_FALSE(bad.ok);
  CHECK(bad.bad_i != bad.bad_j);

  // 5 random nested sets shuffled -> recovered
  rng::Stream r(702);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<std::vector<PairId>> sets(5);
    std::vector<PairId> acc;
    for (auto& s : sets) {
      for (int add = 0; add < 3; ++add)
        acc.push_back(static_cast<PairId>(r.uniform_int(60)));
      std::sort(acc.begin(), acc.end());
      acc.erase(std::unique(acc.begin(), acc.end()), acc.end());
      s = acc;
    }
    for (std::size_t i = sets.size(); i > 1; --i)
      std::swap(sets[i - 1], sets[r.uniform_int(i)]);
    auto witness = knowledge::nesting_witness(sets);
    REQUIRE(witness.ok);
    for (std::size_t k = 1; k < witness.order.size(); ++k) {
      const auto& small = sets[witness.order[k - 1]];
      const auto& big = sets[witness.order[k]];
      REQUIRE(std::includes(big.begin(), big.end(), small.begin(), small.end()));
    }
  }
}

namespace {

// Metrics recomputed from raw records with no incremental state.
struct SweepOracle {
  const corpus::Corpus& corpus_ref;
  std::vector<RawPatent> raw;

  explicit SweepOracle(const corpus::Corpus& c) : corpus_ref(c) {
    for (std::size_t i = 0; i < c.records.size(); ++i)
      raw.push_back({c.records[i].patent_id, c.records[i].filing_date,
                     c.tokenized[i].pairs});
  }

  std::vector<PairId> knowledge(const std::string& inventor, Date t) const {
    std::set<PairId> acc;
    for (std::size_t i = 0; i < corpus_ref.records.size(); ++i) {
      const auto& rec = corpus_ref.records[i];
      if (!(rec.filing_date < t)) continue;
      if (std::find(rec.inventor_ids.begin(), rec.inventor_ids.end(),
                    inventor) == rec.inventor_ids.end())
        continue;
      for (auto w : corpus_ref.tokenized[i].pairs) acc.insert(w);
    }
    return {acc.begin(), acc.end()};
  }

  double mass(const std::vector<PairId>& pairs, Date t) const {
    double sum = 0.0;
    for (auto w : pairs) sum += oracles::pair_novelty(raw, w, t);
    return sum;
  }

  // Geometric-mean share from first principles.
  double s_of(const std::vector<PairId>& a, const std::vector<PairId>& b,
              Date t, bool* both_empty = nullptr) const {
    if (both_empty) *both_empty = a.empty() && b.empty();
    if (a.empty() || b.empty()) return 0.0;
    std::vector<PairId> only_a, only_b, uni;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(only_a));
    std::set_difference(b.begin(), b.end(), a.begin(), a.end(),
                        std::back_inserter(only_b));
    std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                   std::back_inserter(uni));
    const double s =
        std::sqrt(mass(only_a, t) * mass(only_b, t)) / mass(uni, t);
    return std::min(s, 0.5);
  }
};

}  // namespace

TEST_CASE("the sweep matches a from-scratch recomputation") {
  rng::Stream r(703);
  std::vector<corpus::PatentRecord> records;
  const Date base = make_date(2001, 1, 1);
  const char* vocab[] = {"red", "green", "blue", "cyan", "teal", "plum",
                         "gold", "jade", "rust", "sand"};
  for (int p = 0; p < 150; ++p) {
    corpus::PatentRecord rec;
    rec.patent_id = "P" + std::to_string(p);
    rec.filing_date = Date{base.days + static_cast<std::int32_t>(r.uniform_int(40))};
    const int words = static_cast<int>(r.uniform_int(5));  // 0 and 1 occur
    for (int w = 0; w < words; ++w) {
      if (w) rec.abstract += ' ';
      rec.abstract += vocab[r.uniform_int(10)];
    }
    const int team = 1 + static_cast<int>(r.uniform_int(4));
    for (int i = 0; i < team; ++i)
      rec.inventor_ids.push_back("i" + std::to_string(r.uniform_int(8)));
    rec.inventor_ids = [&] {
      std::vector<std::string> v = rec.inventor_ids;
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
      return v;
    }();
    rec.firm_id = "F" + std::to_string(r.uniform_int(3));
    rec.ipc = "G06F";
    records.push_back(std::move(rec));
  }
  auto built = corpus::build_corpus(std::move(records),
                                    corpus::StandardizationConfig{}, 1);
  auto index = novelty::NoveltyIndex::build(novelty::sorted_inputs(built),
                                            built.pairs.size());
  SweepOracle oracle(built);

  for (auto convention : {PairConvention::ordered, PairConvention::unordered}) {
    for (bool exclude : {false, true}) {
      knowledge::SweepOptions options;
      options.convention = convention;
      options.exclude_self_novelty = exclude;
      options.threads = 1;
      auto rows = knowledge::run_sweep(built, index, options);

      knowledge::SweepOptions par = options;
      par.threads = 8;
      auto rows_par = knowledge::run_sweep(built, index, par);
      REQUIRE(rows.size() == rows_par.size());

      std::size_t expected_rows = 0;
      for (std::size_t i = 0; i < built.records.size(); ++i)
        if (built.records[i].inventor_ids.size() >= 2 &&
            !built.tokenized[i].pairs.empty())
          ++expected_rows;
      REQUIRE(rows.size() == expected_rows);

      std::map<std::string, const knowledge::PatentMetrics*> by_id;
      for (const auto& m : rows) by_id[m.patent_id] = &m;

      for (std::size_t i = 0; i < built.records.size(); ++i) {
        const auto& rec = built.records[i];
        const auto& pairs = built.tokenized[i].pairs;
        const auto h = rec.inventor_ids.size();
        auto it = by_id.find(rec.patent_id);
        if (h < 2 || pairs.empty()) {
          REQUIRE(it == by_id.end());
          continue;
        }
        REQUIRE(it != by_id.end());
        const auto& m = *it->second;
        const Date t = rec.filing_date;

        CHECK(m.inventor_count == h);
        const std::uint32_t mp = convention == PairConvention::ordered
                                     ? h * (h - 1)
                                     : h * (h - 1) / 2;
        CHECK(m.pair_count == mp);
        CHECK(m.word_pairs == pairs.size());

        RawPatent focal{rec.patent_id, t, pairs};
        auto recount = oracles::patent_novelty(oracle.raw, focal, exclude);
        CHECK(m.novelty == doctest::Approx(recount.novelty).epsilon(1e-12));
        CHECK(m.pairwise_novelty ==
              doctest::Approx(recount.novelty / mp).epsilon(1e-12));

        double s_sum = 0.0, k_sum = 0.0;
        bool any_both_empty = false;
        std::size_t n_pairs = 0;
        for (std::size_t a = 0; a < h; ++a) {
          auto ka = oracle.knowledge(rec.inventor_ids[a], t);
          k_sum += static_cast<double>(ka.size());
          for (std::size_t b = a + 1; b < h; ++b) {
            auto kb = oracle.knowledge(rec.inventor_ids[b], t);
            bool both = false;
            s_sum += oracle.s_of(ka, kb, t, &both);
            any_both_empty = any_both_empty || both;
            ++n_pairs;
          }
        }
        CHECK(m.differentiation ==
              doctest::Approx(s_sum / n_pairs).epsilon(1e-10));
        CHECK(m.mean_knowledge == doctest::Approx(k_sum / h).epsilon(1e-12));
        CHECK(m.has_empty_pair == any_both_empty);
        CHECK(m.differentiation >= 0.0);
        CHECK(m.differentiation <= 0.5);

        // thread-count equality, field by field
        const auto& mp_row = *std::find_if(
            rows_par.begin(), rows_par.end(),
            [&](const auto& x) { return x.patent_id == rec.patent_id; });
        CHECK(mp_row.novelty == m.novelty);
        CHECK(mp_row.differentiation == m.differentiation);
        CHECK(mp_row.mean_knowledge == m.mean_knowledge);
      }
    }
  }
}

TEST_CASE("analysis start gates emission but not accumulation") {
  std::vector<corpus::PatentRecord> records;
  const Date early = make_date(2000, 1, 1);
  const Date late = make_date(2010, 1, 1);
  auto add = [&](std::string id, Date d, std::string abstract,
                 std::vector<std::string> inv) {
    corpus::PatentRecord rec;
    rec.patent_id = std::move(id);
    rec.filing_date = d;
    rec.abstract = std::move(abstract);
    rec.inventor_ids = std::move(inv);
    rec.firm_id = "F";
    rec.ipc = "A";
    records.push_back(std::move(rec));
  };
  add("Old", early, "alpha beta", {"i", "j"});
  add("New", late, "alpha beta gamma", {"i", "j"});
  auto built = corpus::build_corpus(std::move(records),
                                    corpus::StandardizationConfig{}, 1);
  auto index = novelty::NoveltyIndex::build(novelty::sorted_inputs(built),
                                            built.pairs.size());
  knowledge::SweepOptions options;
  options.analysis_start = make_date(2005, 1, 1);
  auto rows = knowledge::run_sweep(built, index, options);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].patent_id == "New");
  // the burn-in patent still fed both inventors' knowledge
  CHECK(rows[0].mean_knowledge == 1.0);
  CHECK(rows[0].differentiation == 0.0);  // identical knowledge sets
  CHECK_FALSE(rows[0].has_empty_pair);
}

TEST_CASE("citation metrics follow the window and overlap rules") {
  std::vector<corpus::PatentRecord> records;
  auto add = [&](std::string id, Date d, std::vector<std::string> inv,
                 std::vector<std::string> cites) {
    corpus::PatentRecord rec;
    rec.patent_id = std::move(id);
    rec.filing_date = d;
    rec.abstract = "alpha beta";  // enough for H>=2 rows to emit
    rec.inventor_ids = std::move(inv);
    rec.firm_id = "F";
    rec.ipc = "A";
    rec.cited_ids = std::move(cites);
    records.push_back(std::move(rec));
  };
  const Date t_p = make_date(2000, 6, 15);
  add("P", t_p, {"a", "b"}, {});                          // M_p = 2 ordered
  add("Q1", make_date(2001, 1, 1), {"c"}, {"P"});         // counts
  add("Q2", make_date(2003, 5, 5), {"d", "e"}, {"P"});    // counts
  add("Q3", make_date(2005, 6, 15), {"f"}, {"P"});        // boundary: counts
  add("Q4", make_date(2005, 6, 16), {"g"}, {"P"});        // one day past
  add("Q5", make_date(2002, 1, 1), {"a", "z"}, {"P"});    // overlap: excluded
  add("Q6", make_date(1999, 1, 1), {"h"}, {"P"});         // cites the future
  add("Q7", make_date(2002, 1, 1), {"k"}, {"P", "missing"});  // counts
  auto built = corpus::build_corpus(std::move(records),
                                    corpus::StandardizationConfig{}, 1);

  CHECK(knowledge::citation_count(built, 0, 5) == 4);
  knowledge::CitationOptions options;
  auto per_pair = knowledge::citation_metrics(built, options);
  CHECK(per_pair[0] == doctest::Approx(4.0 / 2.0));

  // the spec example: 3 disjoint citers, M_p = 2 -> 1.5
  // and a 6-years-later citation is ignored
  knowledge::CitationOptions unordered{5, PairConvention::unordered};
  auto per_unordered = knowledge::citation_metrics(built, unordered);
  CHECK(per_unordered[0] == doctest::Approx(4.0 / 1.0));
}
