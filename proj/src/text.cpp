#include "recomb/text.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "recomb/errors.hpp"

namespace recomb::corpus {

std::vector<SuffixRule> StandardizationConfig::default_suffix_rules() {
  // Longest-suffix-first is enforced at application time; identity rules
  // shield endings that the bare "s" strip would mangle.
  return {
      {"sses", "ss"}, {"ies", "y"}, {"ing", ""}, {"ed", ""},
      {"ss", "ss"},   {"us", "us"}, {"s", ""},
  };
}

std::unordered_map<std::string, std::string> load_lemma_tsv(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open lemma dictionary: " + path);
  std::unordered_map<std::string, std::string> dict;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw InputError(path + ":" + std::to_string(lineno) +
                       ": expected word<TAB>lemma");
    dict.emplace(line.substr(0, tab), line.substr(tab + 1));
  }
  return dict;
}

std::unordered_set<std::string> load_stopwords(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open stopword file: " + path);
  std::unordered_set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) words.insert(line);
  }
  return words;
}

namespace {

bool is_token_char(unsigned char c) { return std::isalnum(c) != 0; }

// Splits on everything that is not [a-zA-Z0-9], except a hyphen with
// alphanumeric neighbors on both sides. Non-ASCII bytes are separators.
std::vector<std::string> raw_tokens(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  const std::size_t n = text.size();
  for (std::size_t i = 0; i < n; ++i) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    if (c < 0x80 && is_token_char(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (c == '-' && !cur.empty() && i + 1 < n &&
               static_cast<unsigned char>(text[i + 1]) < 0x80 &&
               is_token_char(static_cast<unsigned char>(text[i + 1]))) {
      cur.push_back('-');
    } else {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::string apply_best_rule(const std::string& seg,
                            const StandardizationConfig& cfg) {
  // Longest matching suffix wins; ties fall to config order. Identity rules
  // always pass; strip rules need min_stem_length characters left over.
  const SuffixRule* best = nullptr;
  for (const auto& rule : cfg.suffix_rules) {
    if (rule.suffix.empty() || rule.suffix.size() > seg.size()) continue;
    if (best && rule.suffix.size() <= best->suffix.size()) continue;
    if (!seg.ends_with(rule.suffix)) continue;
    bool identity = rule.replacement == rule.suffix;
    if (identity || seg.size() - rule.suffix.size() >= cfg.min_stem_length)
      best = &rule;
  }
  if (!best) return seg;
  return seg.substr(0, seg.size() - best->suffix.size()) + best->replacement;
}

using ValueSet = std::unordered_set<std::string_view>;

// Dictionary entries are followed first (chains included); dictionary
// values are final forms and never re-stripped. Otherwise suffix rules run
// to a fixed point, so standardized output re-standardizes to itself.
std::string lemmatize_segment(std::string seg, const StandardizationConfig& cfg,
                              const ValueSet& final_forms) {
  for (int guard = 0; guard < 8; ++guard) {
    if (auto it = cfg.lemma_dictionary.find(seg);
        it != cfg.lemma_dictionary.end()) {
      seg = it->second;
      continue;
    }
    if (final_forms.count(seg)) return seg;
    std::string next = apply_best_rule(seg, cfg);
    if (next == seg) return seg;
    seg = std::move(next);
  }
  return seg;
}

std::string lemmatize(const std::string& token, const StandardizationConfig& cfg,
                      const ValueSet& final_forms) {
  // Whole-token dictionary hits and values win, hyphenated or not.
  if (cfg.lemma_dictionary.count(token) || final_forms.count(token))
    return lemmatize_segment(token, cfg, final_forms);
  if (token.find('-') == std::string::npos)
    return lemmatize_segment(token, cfg, final_forms);
  std::string out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= token.size(); ++i) {
    if (i == token.size() || token[i] == '-') {
      if (!out.empty()) out.push_back('-');
      out += lemmatize_segment(token.substr(start, i - start), cfg, final_forms);
      start = i + 1;
    }
  }
  return out;
}

bool has_digit(const std::string& t) {
  return std::any_of(t.begin(), t.end(),
                     [](unsigned char c) { return std::isdigit(c) != 0; });
}

}  // namespace

std::vector<std::string> standardize_text(std::string_view raw,
                                          const StandardizationConfig& cfg) {
  ValueSet final_forms;
  final_forms.reserve(cfg.lemma_dictionary.size());
  for (const auto& entry : cfg.lemma_dictionary)
    final_forms.insert(entry.second);
  std::vector<std::string> out;
  for (auto& tok : raw_tokens(raw)) {
    if (has_digit(tok)) continue;
    if (tok.size() < 2) continue;
    if (cfg.stopwords.count(tok)) continue;
    std::string lemma = lemmatize(tok, cfg, final_forms);
    if (lemma.size() < 2) continue;
    if (cfg.stopwords.count(lemma)) continue;
    out.push_back(std::move(lemma));
  }
  return out;
}

}  // namespace recomb::corpus
