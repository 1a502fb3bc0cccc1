#include "recomb/novelty.hpp"

#include <omp.h>

#include <algorithm>
#include <fstream>

#include "recomb/errors.hpp"

namespace recomb::novelty {

namespace {

// (pair, patents-at-this-date-containing-it) aggregates for one date group,
// sorted by pair id.
std::vector<std::pair<PairId, std::uint32_t>> group_increments(
    std::span<const IndexInput> group) {
  std::vector<PairId> occurrences;
  std::size_t total = 0;
  for (const auto& rec : group) total += rec.pairs.size();
  occurrences.reserve(total);
  for (const auto& rec : group)
    occurrences.insert(occurrences.end(), rec.pairs.begin(), rec.pairs.end());
  std::sort(occurrences.begin(), occurrences.end());
  std::vector<std::pair<PairId, std::uint32_t>> increments;
  for (std::size_t i = 0; i < occurrences.size();) {
    std::size_t j = i;
    while (j < occurrences.size() && occurrences[j] == occurrences[i]) ++j;
    increments.emplace_back(occurrences[i], static_cast<std::uint32_t>(j - i));
    i = j;
  }
  return increments;
}

}  // namespace

NoveltyIndex NoveltyIndex::build(std::span<const IndexInput> records,
                                 std::size_t pair_universe, int threads) {
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].date < records[i - 1].date)
      throw InputError("records not sorted by filing date: '" +
                       std::string(records[i].patent_id) + "' precedes '" +
                       std::string(records[i - 1].patent_id) + "'");
  }

  // Date group boundaries.
  std::vector<std::size_t> starts;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (i == 0 || records[i].date != records[i - 1].date) starts.push_back(i);
  }
  const std::size_t n_groups = starts.size();
  auto group_span = [&](std::size_t g) {
    std::size_t begin = starts[g];
    std::size_t end = g + 1 < n_groups ? starts[g + 1] : records.size();
    return records.subspan(begin, end - begin);
  };

  // Phase 1: per-group pair aggregates. Groups are independent, so this is
  // the parallel part; the serial path is the reference implementation.
  std::vector<std::vector<std::pair<PairId, std::uint32_t>>> incs(n_groups);
  if (threads == 1) {
    for (std::size_t g = 0; g < n_groups; ++g)
      incs[g] = group_increments(group_span(g));
  } else {
#pragma omp parallel for schedule(dynamic, 16) num_threads(threads)
    for (std::size_t g = 0; g < n_groups; ++g)
      incs[g] = group_increments(group_span(g));
  }

  NoveltyIndex index;
  index.dates_.resize(n_groups);
  index.cum_slots_.resize(n_groups);
  index.cum_patents_.resize(n_groups);

  // Count postings per pair, then fill CSR slices chronologically.
  std::vector<std::uint32_t> posting_count(pair_universe, 0);
  for (const auto& group : incs)
    for (const auto& [pair, inc] : group) {
      (void)inc;
      ++posting_count[pair];
    }
  index.offsets_.assign(pair_universe + 1, 0);
  for (std::size_t p = 0; p < pair_universe; ++p)
    index.offsets_[p + 1] = index.offsets_[p] + posting_count[p];
  index.posting_date_.resize(index.offsets_.back());
  index.posting_cum_.resize(index.offsets_.back());

  std::vector<std::uint64_t> cursor(index.offsets_.begin(),
                                    index.offsets_.end() - 1);
  std::vector<std::uint32_t> doc_freq(pair_universe, 0);
  std::uint64_t slots = 0;
  std::uint32_t patents = 0;
  for (std::size_t g = 0; g < n_groups; ++g) {
    auto group = group_span(g);
    index.dates_[g] = group.front().date.days;
    for (const auto& rec : group) slots += rec.pairs.size();
    patents += static_cast<std::uint32_t>(group.size());
    index.cum_slots_[g] = slots;
    index.cum_patents_[g] = patents;
    for (const auto& [pair, inc] : incs[g]) {
      doc_freq[pair] += inc;
      index.posting_date_[cursor[pair]] = static_cast<std::uint32_t>(g);
      index.posting_cum_[cursor[pair]] = doc_freq[pair];
      ++cursor[pair];
    }
  }
  return index;
}

std::size_t NoveltyIndex::date_floor(Date t) const {
  auto it = std::upper_bound(dates_.begin(), dates_.end(), t.days);
  if (it == dates_.begin()) return static_cast<std::size_t>(-1);
  return static_cast<std::size_t>(it - dates_.begin()) - 1;
}

std::uint64_t NoveltyIndex::total_slots(Date t) const {
  std::size_t idx = date_floor(t);
  return idx == static_cast<std::size_t>(-1) ? 0 : cum_slots_[idx];
}

std::uint32_t NoveltyIndex::patents_up_to(Date t) const {
  std::size_t idx = date_floor(t);
  return idx == static_cast<std::size_t>(-1) ? 0 : cum_patents_[idx];
}

std::uint32_t NoveltyIndex::doc_freq(PairId w, Date t) const {
  if (w >= pair_universe()) return 0;
  std::size_t idx = date_floor(t);
  if (idx == static_cast<std::size_t>(-1)) return 0;
  auto begin = posting_date_.begin() + static_cast<std::ptrdiff_t>(offsets_[w]);
  auto end = posting_date_.begin() + static_cast<std::ptrdiff_t>(offsets_[w + 1]);
  auto it = std::upper_bound(begin, end, static_cast<std::uint32_t>(idx));
  if (it == begin) return 0;
  std::size_t pos = static_cast<std::size_t>(it - posting_date_.begin()) - 1;
  return posting_cum_[pos];
}

PairStat NoveltyIndex::pair_novelty(PairId w, Date t) const {
  PairStat stat{total_slots(t), doc_freq(w, t)};
  if (stat.doc_freq == 0)
    throw ComputeError("word pair " + std::to_string(w) +
                       " never seen up to " + format_date(t));
  return stat;
}

PatentNoveltyReport NoveltyIndex::patent_novelty(Date date,
                                                 std::span<const PairId> pairs,
                                                 bool exclude_self) const {
  if (pairs.empty())
    throw ComputeError("patent novelty undefined for an empty pair set");
  PatentNoveltyReport report;
  report.pair_count = static_cast<std::uint32_t>(pairs.size());
  const std::uint64_t total = total_slots(date);
  const std::uint64_t total_adj = exclude_self ? total - pairs.size() : total;
  double sum = 0.0;
  std::uint32_t used = 0;
  for (PairId w : pairs) {
    std::uint32_t df = doc_freq(w, date);
    if (df == 0)
      throw ComputeError("pair " + std::to_string(w) +
                         " missing from index at " + format_date(date) +
                         "; patent not ingested?");
    if (exclude_self) {
      if (df == 1) continue;  // first-ever pair: no history without self
      df -= 1;
    }
    sum += static_cast<double>(total_adj) / static_cast<double>(df);
    ++used;
  }
  report.pairs_used = used;
  report.novelty = used ? sum / used : 0.0;
  return report;
}

std::vector<IndexInput> sorted_inputs(const corpus::Corpus& corpus) {
  std::vector<IndexInput> inputs;
  inputs.reserve(corpus.records.size());
  for (std::size_t i = 0; i < corpus.records.size(); ++i) {
    inputs.push_back(IndexInput{corpus.records[i].patent_id,
                                corpus.records[i].filing_date,
                                corpus.tokenized[i].pairs});
  }
  std::stable_sort(inputs.begin(), inputs.end(),
                   [](const IndexInput& a, const IndexInput& b) {
                     return a.date < b.date;
                   });
  return inputs;
}

namespace {

constexpr std::uint32_t kIndexMagic = 0x52584931;  // "RXI1"

template <typename T>
void put_vec(std::ofstream& os, const std::vector<T>& v) {
  std::uint64_t n = v.size();
  os.write(reinterpret_cast<const char*>(&n), sizeof n);
  os.write(reinterpret_cast<const char*>(v.data()),
           static_cast<std::streamsize>(n * sizeof(T)));
}

template <typename T>
std::vector<T> get_vec(std::ifstream& in, const std::string& path) {
  std::uint64_t n = 0;
  in.read(reinterpret_cast<char*>(&n), sizeof n);
  std::vector<T> v(n);
  in.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(n * sizeof(T)));
  if (!in) throw InputError("truncated index snapshot: " + path);
  return v;
}

}  // namespace

struct SnapshotAccess {
  static void save(const std::string& path, const NoveltyIndex& index,
                   const corpus::WordTable& words,
                   const corpus::PairTable& pairs,
                   std::uint64_t corpus_digest) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw InputError("cannot write file: " + path);
    os.write(reinterpret_cast<const char*>(&kIndexMagic), sizeof kIndexMagic);
    os.write(reinterpret_cast<const char*>(&corpus_digest),
             sizeof corpus_digest);
    std::uint32_t n_words = static_cast<std::uint32_t>(words.size());
    os.write(reinterpret_cast<const char*>(&n_words), sizeof n_words);
    for (std::uint32_t i = 0; i < n_words; ++i) {
      const std::string& w = words.word(i);
      std::uint32_t len = static_cast<std::uint32_t>(w.size());
      os.write(reinterpret_cast<const char*>(&len), sizeof len);
      os.write(w.data(), len);
    }
    std::uint32_t n_pairs = static_cast<std::uint32_t>(pairs.size());
    os.write(reinterpret_cast<const char*>(&n_pairs), sizeof n_pairs);
    for (std::uint32_t i = 0; i < n_pairs; ++i) {
      auto [a, b] = pairs.words_of(i);
      os.write(reinterpret_cast<const char*>(&a), sizeof a);
      os.write(reinterpret_cast<const char*>(&b), sizeof b);
    }
    put_vec(os, index.dates_);
    put_vec(os, index.cum_slots_);
    put_vec(os, index.cum_patents_);
    put_vec(os, index.offsets_);
    put_vec(os, index.posting_date_);
    put_vec(os, index.posting_cum_);
    if (!os) throw InputError("write failed: " + path);
  }

  static Snapshot load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open file: " + path);
    std::uint32_t magic = 0;
    in.read(reinterpret_cast<char*>(&magic), sizeof magic);
    if (!in || magic != kIndexMagic)
      throw InputError(path + ": not an index snapshot");
    Snapshot snap;
    in.read(reinterpret_cast<char*>(&snap.corpus_digest),
            sizeof snap.corpus_digest);
    std::uint32_t n_words = 0;
    in.read(reinterpret_cast<char*>(&n_words), sizeof n_words);
    for (std::uint32_t i = 0; i < n_words; ++i) {
      std::uint32_t len = 0;
      in.read(reinterpret_cast<char*>(&len), sizeof len);
      std::string w(len, '\0');
      in.read(w.data(), len);
      if (!in) throw InputError("truncated index snapshot: " + path);
      snap.words.intern(w);
    }
    std::uint32_t n_pairs = 0;
    in.read(reinterpret_cast<char*>(&n_pairs), sizeof n_pairs);
    for (std::uint32_t i = 0; i < n_pairs; ++i) {
      corpus::WordId a = 0, b = 0;
      in.read(reinterpret_cast<char*>(&a), sizeof a);
      in.read(reinterpret_cast<char*>(&b), sizeof b);
      if (!in) throw InputError("truncated index snapshot: " + path);
      snap.pairs.intern(a, b);
    }
    snap.index.dates_ = get_vec<std::int32_t>(in, path);
    snap.index.cum_slots_ = get_vec<std::uint64_t>(in, path);
    snap.index.cum_patents_ = get_vec<std::uint32_t>(in, path);
    snap.index.offsets_ = get_vec<std::uint64_t>(in, path);
    snap.index.posting_date_ = get_vec<std::uint32_t>(in, path);
    snap.index.posting_cum_ = get_vec<std::uint32_t>(in, path);
    return snap;
  }
};

void save_index(const std::string& path, const NoveltyIndex& index,
                const corpus::WordTable& words, const corpus::PairTable& pairs,
                std::uint64_t corpus_digest) {
  SnapshotAccess::save(path, index, words, pairs, corpus_digest);
}

Snapshot load_index(const std::string& path) {
  return SnapshotAccess::load(path);
}

}  // namespace recomb::novelty
