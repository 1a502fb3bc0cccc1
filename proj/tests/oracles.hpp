// Brute-force reference implementations used by both the unit tests and the
// acceptance gate. Everything here recomputes from raw records with no
// incremental state, trading speed for obviousness.
#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "recomb/dates.hpp"
#include "recomb/novelty.hpp"
#include "recomb/rng.hpp"

namespace oracles {

struct RawPatent {
  std::string id;
  recomb::Date date;
  std::vector<recomb::corpus::PairId> pairs;  // sorted distinct
};

// T(t): total pair-slots over patents dated <= t.
inline std::uint64_t total_slots(const std::vector<RawPatent>& corpus,
                                 recomb::Date t) {
  std::uint64_t total = 0;
  for (const auto& p : corpus)
    if (p.date <= t) total += p.pairs.size();
  return total;
}

// df_w(t): patents dated <= t containing w.
inline std::uint32_t doc_freq(const std::vector<RawPatent>& corpus,
                              recomb::corpus::PairId w, recomb::Date t) {
  std::uint32_t count = 0;
  for (const auto& p : corpus)
    if (p.date <= t &&
        std::binary_search(p.pairs.begin(), p.pairs.end(), w))
      ++count;
  return count;
}

inline double pair_novelty(const std::vector<RawPatent>& corpus,
                           recomb::corpus::PairId w, recomb::Date t) {
  return static_cast<double>(total_slots(corpus, t)) /
         static_cast<double>(doc_freq(corpus, w, t));
}

struct NoveltyRecount {
  std::uint32_t pairs_used = 0;
  double novelty = 0.0;
};

// Mean pair novelty of one patent at its own date, recomputed from scratch.
// With exclude_self, the focal patent leaves both T and every df.
inline NoveltyRecount patent_novelty(const std::vector<RawPatent>& corpus,
                                     const RawPatent& focal,
                                     bool exclude_self) {
  NoveltyRecount out;
  if (focal.pairs.empty()) return out;
  const std::uint64_t t_all = total_slots(corpus, focal.date);
  double sum = 0.0;
  for (auto w : focal.pairs) {
    std::uint64_t t = t_all;
    std::uint32_t df = doc_freq(corpus, w, focal.date);
    if (exclude_self) {
      t -= focal.pairs.size();
      df -= 1;
      if (df == 0) continue;
    }
    sum += static_cast<double>(t) / static_cast<double>(df);
    ++out.pairs_used;
  }
  if (out.pairs_used > 0) out.novelty = sum / out.pairs_used;
  return out;
}

// Random corpora for oracle comparisons: small pair universes force heavy
// pair reuse, date ties included on purpose.
inline std::vector<RawPatent> random_corpus(recomb::rng::Stream& r,
                                            int max_patents, int max_words) {
  const int patents = 1 + static_cast<int>(r.uniform_int(max_patents));
  const int words = 2 + static_cast<int>(r.uniform_int(max_words - 1));
  const int universe = words * (words - 1) / 2;
  std::vector<RawPatent> corpus(patents);
  const recomb::Date base = recomb::make_date(2000, 1, 1);
  for (int i = 0; i < patents; ++i) {
    corpus[i].id = "R" + std::to_string(i);
    corpus[i].date =
        recomb::Date{base.days + static_cast<std::int32_t>(
                                     r.uniform_int(max_patents / 2 + 1))};
    for (int w = 0; w < universe; ++w)
      if (r.uniform_int(100) < 25)
        corpus[i].pairs.push_back(static_cast<recomb::corpus::PairId>(w));
    // a few patents carry no pairs at all
    if (r.uniform_int(12) == 0) corpus[i].pairs.clear();
  }
  std::sort(corpus.begin(), corpus.end(),
            [](const RawPatent& a, const RawPatent& b) { return a.date < b.date; });
  return corpus;
}

inline std::vector<recomb::novelty::IndexInput> as_inputs(
    const std::vector<RawPatent>& corpus) {
  std::vector<recomb::novelty::IndexInput> inputs;
  inputs.reserve(corpus.size());
  for (const auto& p : corpus)
    inputs.push_back({p.id, p.date, p.pairs});
  return inputs;
}

inline std::size_t universe_of(const std::vector<RawPatent>& corpus) {
  std::size_t u = 1;
  for (const auto& p : corpus)
    for (auto w : p.pairs) u = std::max<std::size_t>(u, w + 1);
  return u;
}

}  // namespace oracles
