#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "recomb/corpus.hpp"
#include "recomb/dates.hpp"

namespace recomb::novelty {

using corpus::PairId;

// One patent as the index builder sees it.
struct IndexInput {
  std::string_view patent_id;
  Date date;
  std::span<const PairId> pairs;  // sorted distinct pair ids
};

// A word pair's frequency state as of some date: total pair-slots filed up
// to that date and the number of those patents containing the pair.
struct PairStat {
  std::uint64_t total_slots = 0;
  std::uint32_t doc_freq = 0;

  double value() const {
    return static_cast<double>(total_slots) / static_cast<double>(doc_freq);
  }
};

struct PatentNoveltyReport {
  std::uint32_t pair_count = 0;  // W_p
  std::uint32_t pairs_used = 0;  // differs from pair_count only if excluding
                                 // the focal patent drops first-ever pairs
  double novelty = 0.0;          // mean of n_{w,t} over the pairs used
};

// Chronological word-pair frequency index. Immutable once built; all
// queries are safe to run concurrently.
class NoveltyIndex {
 public:
  // Requires records sorted non-decreasing by date (ordering error names the
  // offending record otherwise). Patents sharing a date see each other.
  // threads == 1 runs the serial reference fold; otherwise date-group
  // aggregation runs under OpenMP with identical results.
  static NoveltyIndex build(std::span<const IndexInput> records,
                            std::size_t pair_universe, int threads = 1);

  // Cumulative pair-slot total T(t): 0 before the first record date.
  std::uint64_t total_slots(Date t) const;

  // Number of patents dated <= t containing pair w; 0 if never seen.
  std::uint32_t doc_freq(PairId w, Date t) const;

  std::uint32_t patents_up_to(Date t) const;

  // n_wt = T(t) / df_w(t). Throws ComputeError if the pair is unseen at t.
  PairStat pair_novelty(PairId w, Date t) const;

  // Mean pair novelty for a patent already ingested at `date`. When
  // exclude_self is set, the focal patent is removed from both numerator
  // and denominator; pairs it introduced are skipped, and a patent whose
  // pairs are all first-ever reports novelty 0 with pairs_used = 0.
  PatentNoveltyReport patent_novelty(Date date, std::span<const PairId> pairs,
                                     bool exclude_self = false) const;

  std::size_t pair_universe() const { return offsets_.size() - 1; }
  std::span<const std::int32_t> dates() const { return dates_; }

  bool operator==(const NoveltyIndex&) const = default;

 private:
  friend struct SnapshotAccess;

  // index of the last distinct date <= t, or npos
  std::size_t date_floor(Date t) const;

  std::vector<std::int32_t> dates_;        // sorted distinct filing dates
  std::vector<std::uint64_t> cum_slots_;   // T at each date
  std::vector<std::uint32_t> cum_patents_;
  // Per-pair postings in CSR form: (date index, cumulative doc count) at
  // every date the pair's count changed.
  std::vector<std::uint64_t> offsets_;
  std::vector<std::uint32_t> posting_date_;
  std::vector<std::uint32_t> posting_cum_;
};

struct Snapshot {
  NoveltyIndex index;
  corpus::WordTable words;
  corpus::PairTable pairs;
  std::uint64_t corpus_digest = 0;
};

// Versioned binary snapshot carrying the index plus the intern tables.
void save_index(const std::string& path, const NoveltyIndex& index,
                const corpus::WordTable& words, const corpus::PairTable& pairs,
                std::uint64_t corpus_digest);
Snapshot load_index(const std::string& path);

// Convenience: date-sorted index inputs for a corpus (stable sort, so file
// order breaks date ties deterministically). The returned views point into
// `corpus`, which must outlive them.
std::vector<IndexInput> sorted_inputs(const corpus::Corpus& corpus);

}  // namespace recomb::novelty
