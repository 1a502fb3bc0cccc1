#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "recomb/dates.hpp"
#include "recomb/text.hpp"

namespace recomb::corpus {

using WordId = std::uint32_t;
using PairId = std::uint32_t;

// One document as parsed from input.
struct PatentRecord {
  std::string patent_id;
  Date filing_date;
  std::string abstract;
  std::vector<std::string> inventor_ids;  // deduplicated, first-seen order
  std::string firm_id;
  std::string ipc;       // raw IPC string
  std::vector<std::string> cited_ids;  // citations made by this patent
};

// First three characters of the raw IPC string (the whole string if shorter).
inline std::string ipc_class_of(const PatentRecord& r) {
  return r.ipc.substr(0, 3);
}

enum class FileFormat { jsonl, csv };

// Parses records in file order. Throws InputError for malformed lines
// (with line number), duplicate patent ids, and unparseable dates.
std::vector<PatentRecord> parse_patent_file(const std::string& path,
                                            FileFormat format);

// Insert-or-get string table with ids stable for the lifetime of the table.
// Concurrent intern/lookup is allowed; ids are assigned in first-insert order.
class WordTable {
 public:
  WordTable() = default;
  // Moving requires exclusive use of both sides, as usual; the mutex itself
  // is not movable, so the moved-to table starts with a fresh one. View keys
  // stay valid because deque elements do not relocate on container move.
  WordTable(WordTable&& other) noexcept
      : words_(std::move(other.words_)), index_(std::move(other.index_)) {}
  WordTable& operator=(WordTable&& other) noexcept {
    words_ = std::move(other.words_);
    index_ = std::move(other.index_);
    return *this;
  }

  WordId intern(std::string_view word);
  const std::string& word(WordId id) const;
  std::size_t size() const;

 private:
  mutable std::shared_mutex mutex_;
  std::deque<std::string> words_;  // deque: grow without moving elements
  std::unordered_map<std::string_view, WordId> index_;
};

// Interns unordered pairs of distinct word ids. The canonical key places the
// smaller word id in the high half, so (a,b) and (b,a) collide by design.
class PairTable {
 public:
  static std::uint64_t key_of(WordId a, WordId b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | b;
  }

  PairTable() = default;
  PairTable(PairTable&& other) noexcept
      : keys_(std::move(other.keys_)), index_(std::move(other.index_)) {}
  PairTable& operator=(PairTable&& other) noexcept {
    keys_ = std::move(other.keys_);
    index_ = std::move(other.index_);
    return *this;
  }

  PairId intern(WordId a, WordId b);
  std::pair<WordId, WordId> words_of(PairId id) const;
  std::size_t size() const;

 private:
  mutable std::shared_mutex mutex_;
  std::vector<std::uint64_t> keys_;
  std::unordered_map<std::uint64_t, PairId> index_;
};

// All unordered pairs of distinct word types in the token list, as sorted
// pair ids. Fewer than two distinct tokens give an empty result.
std::vector<PairId> extract_word_pairs(const std::vector<std::string>& tokens,
                                       WordTable& words, PairTable& pairs);

// A record reduced to what the index and metrics passes need.
struct TokenizedPatent {
  std::uint32_t record_index = 0;
  std::vector<PairId> pairs;  // sorted ascending
};

struct Corpus {
  std::vector<PatentRecord> records;
  std::vector<TokenizedPatent> tokenized;  // parallel to records
  WordTable words;
  PairTable pairs;

  // Order-insensitive digest of (id, date, pairs); used to check that
  // artifacts produced in separate runs refer to the same corpus.
  std::uint64_t content_digest() const;
};

// Tokenizes every record (parallel over records when threads != 1) and
// interns words/pairs sequentially in record order, so ids are reproducible
// regardless of thread count.
Corpus build_corpus(std::vector<PatentRecord> records,
                    const StandardizationConfig& config, int threads = 1);

void save_corpus(const std::string& path, const Corpus& corpus);
Corpus load_corpus(const std::string& path);

}  // namespace recomb::corpus
