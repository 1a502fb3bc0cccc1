#include "recomb/corpus.hpp"

#include <omp.h>

#include <algorithm>
#include <fstream>
#include <mutex>
#include <unordered_set>

#include "json.hpp"
#include "recomb/csv.hpp"
#include "recomb/errors.hpp"
#include "recomb/rng.hpp"

namespace recomb::corpus {

namespace {

std::vector<std::string> dedupe_keep_order(std::vector<std::string> items) {
  std::unordered_set<std::string> seen;
  std::vector<std::string> out;
  out.reserve(items.size());
  for (auto& s : items) {
    if (seen.insert(s).second) out.push_back(s);
  }
  return out;
}

PatentRecord record_from_fields(std::string&& id, std::string&& date,
                                std::string&& abstract,
                                std::vector<std::string>&& inventors,
                                std::string&& firm, std::string&& ipc,
                                std::vector<std::string>&& cites,
                                std::size_t lineno, const std::string& path) {
  PatentRecord rec;
  rec.patent_id = std::move(id);
  if (rec.patent_id.empty())
    throw InputError(path + ":" + std::to_string(lineno) + ": empty patent id");
  rec.filing_date = parse_date(date);
  rec.abstract = std::move(abstract);
  rec.inventor_ids = dedupe_keep_order(std::move(inventors));
  if (rec.inventor_ids.empty())
    throw InputError(path + ":" + std::to_string(lineno) +
                     ": record '" + rec.patent_id + "' has no inventors");
  rec.firm_id = std::move(firm);
  rec.ipc = std::move(ipc);
  rec.cited_ids = dedupe_keep_order(std::move(cites));
  return rec;
}

std::vector<PatentRecord> parse_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open file: " + path);
  std::vector<PatentRecord> records;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw InputError(path + ":" + std::to_string(lineno) +
                       ": malformed JSON: " + e.what());
    }
    auto require = [&](const char* key) -> const nlohmann::json& {
      auto it = j.find(key);
      if (it == j.end())
        throw InputError(path + ":" + std::to_string(lineno) +
                         ": missing key '" + key + "'");
      return *it;
    };
    try {
      std::vector<std::string> inventors =
          require("inventors").get<std::vector<std::string>>();
      std::vector<std::string> cites;
      if (auto it = j.find("cites"); it != j.end())
        cites = it->get<std::vector<std::string>>();
      records.push_back(record_from_fields(
          require("id").get<std::string>(), require("date").get<std::string>(),
          require("abstract").get<std::string>(), std::move(inventors),
          require("firm").get<std::string>(), require("ipc").get<std::string>(),
          std::move(cites), lineno, path));
    } catch (const nlohmann::json::exception& e) {
      throw InputError(path + ":" + std::to_string(lineno) +
                       ": malformed record: " + e.what());
    }
  }
  return records;
}

const std::vector<std::string> kCsvHeader = {
    "id", "date", "abstract", "inventors", "firm", "ipc", "cites"};

std::vector<PatentRecord> parse_csv(const std::string& path) {
  CsvReader reader(path);
  auto header = reader.next();
  if (!header || *header != kCsvHeader)
    throw InputError(path + ": expected CSV header " +
                     join_list(kCsvHeader, ','));
  std::vector<PatentRecord> records;
  while (auto row = reader.next()) {
    if (row->size() != kCsvHeader.size())
      throw InputError(path + ":" + std::to_string(reader.line()) +
                       ": expected " + std::to_string(kCsvHeader.size()) +
                       " fields, got " + std::to_string(row->size()));
    auto& f = *row;
    records.push_back(record_from_fields(
        std::move(f[0]), std::move(f[1]), std::move(f[2]),
        split_list(f[3]), std::move(f[4]), std::move(f[5]), split_list(f[6]),
        reader.line(), path));
  }
  return records;
}

}  // namespace

std::vector<PatentRecord> parse_patent_file(const std::string& path,
                                            FileFormat format) {
  std::vector<PatentRecord> records =
      format == FileFormat::jsonl ? parse_jsonl(path) : parse_csv(path);
  std::unordered_set<std::string_view> ids;
  for (const auto& r : records) {
    if (!ids.insert(r.patent_id).second)
      throw InputError(path + ": duplicate patent id '" + r.patent_id + "'");
  }
  return records;
}

WordId WordTable::intern(std::string_view word) {
  {
    std::shared_lock lock(mutex_);
    if (auto it = index_.find(word); it != index_.end()) return it->second;
  }
  std::unique_lock lock(mutex_);
  if (auto it = index_.find(word); it != index_.end()) return it->second;
  WordId id = static_cast<WordId>(words_.size());
  words_.emplace_back(word);
  index_.emplace(std::string_view(words_.back()), id);
  return id;
}

const std::string& WordTable::word(WordId id) const {
  std::shared_lock lock(mutex_);
  return words_.at(id);
}

std::size_t WordTable::size() const {
  std::shared_lock lock(mutex_);
  return words_.size();
}

PairId PairTable::intern(WordId a, WordId b) {
  const std::uint64_t key = key_of(a, b);
  {
    std::shared_lock lock(mutex_);
    if (auto it = index_.find(key); it != index_.end()) return it->second;
  }
  std::unique_lock lock(mutex_);
  if (auto it = index_.find(key); it != index_.end()) return it->second;
  PairId id = static_cast<PairId>(keys_.size());
  keys_.push_back(key);
  index_.emplace(key, id);
  return id;
}

std::pair<WordId, WordId> PairTable::words_of(PairId id) const {
  std::shared_lock lock(mutex_);
  std::uint64_t key = keys_.at(id);
  return {static_cast<WordId>(key >> 32),
          static_cast<WordId>(key & 0xffffffffu)};
}

std::size_t PairTable::size() const {
  std::shared_lock lock(mutex_);
  return keys_.size();
}

std::vector<PairId> extract_word_pairs(const std::vector<std::string>& tokens,
                                       WordTable& words, PairTable& pairs) {
  std::vector<WordId> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(words.intern(t));
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  std::vector<PairId> out;
  if (ids.size() < 2) return out;
  out.reserve(ids.size() * (ids.size() - 1) / 2);
  for (std::size_t i = 0; i + 1 < ids.size(); ++i)
    for (std::size_t j = i + 1; j < ids.size(); ++j)
      out.push_back(pairs.intern(ids[i], ids[j]));
  std::sort(out.begin(), out.end());
  return out;
}

std::uint64_t Corpus::content_digest() const {
  // Hash word strings, not intern ids: ids depend on record order, the
  // digest must not. Records and the pairs within one combine additively.
  std::uint64_t h = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    std::uint64_t r = 0xcbf29ce484222325ull;
    auto fold = [&r](std::uint64_t v) {
      r = rng::mix64(r ^ v);
    };
    for (char c : records[i].patent_id) fold(static_cast<unsigned char>(c));
    fold(static_cast<std::uint64_t>(
        static_cast<std::uint32_t>(records[i].filing_date.days)));
    std::uint64_t pair_acc = 0;
    for (PairId p : tokenized[i].pairs) {
      auto [a, b] = pairs.words_of(p);
      const std::string& wa = words.word(a);
      const std::string& wb = words.word(b);
      const std::string& lo = wa < wb ? wa : wb;
      const std::string& hi = wa < wb ? wb : wa;
      std::uint64_t ph = 0xcbf29ce484222325ull;
      for (char c : lo) ph = rng::mix64(ph ^ static_cast<unsigned char>(c));
      ph = rng::mix64(ph ^ 0x1f);
      for (char c : hi) ph = rng::mix64(ph ^ static_cast<unsigned char>(c));
      pair_acc += rng::mix64(ph);
    }
    fold(pair_acc);
    h += rng::mix64(r);
  }
  return h;
}

Corpus build_corpus(std::vector<PatentRecord> records,
                    const StandardizationConfig& config, int threads) {
  Corpus corpus;
  corpus.records = std::move(records);
  const std::size_t n = corpus.records.size();
  std::vector<std::vector<std::string>> tokens(n);
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i)
      tokens[i] = standardize_text(corpus.records[i].abstract, config);
  } else {
#pragma omp parallel for schedule(dynamic, 64) num_threads(threads)
    for (std::size_t i = 0; i < n; ++i)
      tokens[i] = standardize_text(corpus.records[i].abstract, config);
  }
  // Interning runs in record order so word/pair ids do not depend on
  // scheduling.
  corpus.tokenized.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    corpus.tokenized[i].record_index = static_cast<std::uint32_t>(i);
    corpus.tokenized[i].pairs =
        extract_word_pairs(tokens[i], corpus.words, corpus.pairs);
  }
  return corpus;
}

namespace {

void put_u32(std::ostream& os, std::uint32_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void put_u64(std::ostream& os, std::uint64_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void put_i32(std::ostream& os, std::int32_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void put_str(std::ostream& os, const std::string& s) {
  put_u32(os, static_cast<std::uint32_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

struct BinReader {
  std::ifstream in;
  std::string path;

  std::uint32_t u32() {
    std::uint32_t v;
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    check();
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v;
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    check();
    return v;
  }
  std::int32_t i32() {
    std::int32_t v;
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    check();
    return v;
  }
  std::string str() {
    std::uint32_t len = u32();
    std::string s(len, '\0');
    in.read(s.data(), len);
    check();
    return s;
  }
  void check() {
    if (!in) throw InputError("truncated or corrupt file: " + path);
  }
};

constexpr std::uint32_t kCorpusMagic = 0x52435031;  // "RCP1"

}  // namespace

void save_corpus(const std::string& path, const Corpus& corpus) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw InputError("cannot write file: " + path);
  put_u32(os, kCorpusMagic);
  put_u64(os, corpus.content_digest());
  put_u32(os, static_cast<std::uint32_t>(corpus.words.size()));
  for (std::uint32_t i = 0; i < corpus.words.size(); ++i)
    put_str(os, corpus.words.word(i));
  put_u32(os, static_cast<std::uint32_t>(corpus.pairs.size()));
  for (std::uint32_t i = 0; i < corpus.pairs.size(); ++i) {
    auto [a, b] = corpus.pairs.words_of(i);
    put_u32(os, a);
    put_u32(os, b);
  }
  put_u32(os, static_cast<std::uint32_t>(corpus.records.size()));
  for (std::size_t i = 0; i < corpus.records.size(); ++i) {
    const auto& r = corpus.records[i];
    put_str(os, r.patent_id);
    put_i32(os, r.filing_date.days);
    put_str(os, r.abstract);
    put_u32(os, static_cast<std::uint32_t>(r.inventor_ids.size()));
    for (const auto& s : r.inventor_ids) put_str(os, s);
    put_str(os, r.firm_id);
    put_str(os, r.ipc);
    put_u32(os, static_cast<std::uint32_t>(r.cited_ids.size()));
    for (const auto& s : r.cited_ids) put_str(os, s);
    const auto& t = corpus.tokenized[i];
    put_u32(os, static_cast<std::uint32_t>(t.pairs.size()));
    for (PairId p : t.pairs) put_u32(os, p);
  }
  if (!os) throw InputError("write failed: " + path);
}

Corpus load_corpus(const std::string& path) {
  BinReader r{std::ifstream(path, std::ios::binary), path};
  if (!r.in) throw InputError("cannot open file: " + path);
  if (r.u32() != kCorpusMagic)
    throw InputError(path + ": not a corpus file");
  const std::uint64_t digest = r.u64();
  Corpus corpus;
  const std::uint32_t n_words = r.u32();
  for (std::uint32_t i = 0; i < n_words; ++i) {
    WordId id = corpus.words.intern(r.str());
    if (id != i) throw InputError(path + ": duplicate word table entry");
  }
  const std::uint32_t n_pairs = r.u32();
  for (std::uint32_t i = 0; i < n_pairs; ++i) {
    WordId a = r.u32();
    WordId b = r.u32();
    if (corpus.pairs.intern(a, b) != i)
      throw InputError(path + ": duplicate pair table entry");
  }
  const std::uint32_t n_records = r.u32();
  corpus.records.resize(n_records);
  corpus.tokenized.resize(n_records);
  for (std::uint32_t i = 0; i < n_records; ++i) {
    auto& rec = corpus.records[i];
    rec.patent_id = r.str();
    rec.filing_date.days = r.i32();
    rec.abstract = r.str();
    rec.inventor_ids.resize(r.u32());
    for (auto& s : rec.inventor_ids) s = r.str();
    rec.firm_id = r.str();
    rec.ipc = r.str();
    rec.cited_ids.resize(r.u32());
    for (auto& s : rec.cited_ids) s = r.str();
    auto& tok = corpus.tokenized[i];
    tok.record_index = i;
    tok.pairs.resize(r.u32());
    for (auto& p : tok.pairs) p = r.u32();
  }
  if (corpus.content_digest() != digest)
    throw InputError(path + ": content digest mismatch");
  return corpus;
}

}  // namespace recomb::corpus
