#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace recomb::corpus {

struct SuffixRule {
  std::string suffix;
  std::string replacement;
};

// Deterministic text standardization: lowercase, alphabetic tokens with
// internal hyphens, stopword removal, dictionary lemmas with suffix rules
// as fallback. Identity rules (e.g. "ss" -> "ss") act as guards because
// rules are tried longest-suffix-first.
struct StandardizationConfig {
  std::unordered_set<std::string> stopwords;
  std::unordered_map<std::string, std::string> lemma_dictionary;
  std::vector<SuffixRule> suffix_rules = default_suffix_rules();
  // A strip rule applies only if the unmodified stem keeps at least this
  // many characters.
  std::size_t min_stem_length = 3;

  static std::vector<SuffixRule> default_suffix_rules();
};

// Loads "word<TAB>lemma" lines, UTF-8, one entry per line.
std::unordered_map<std::string, std::string> load_lemma_tsv(
    const std::string& path);

// Loads one lowercase word per line; blank lines ignored.
std::unordered_set<std::string> load_stopwords(const std::string& path);

// Raw text to standardized tokens. Tokens are lowercase, contain only
// [a-z] and internal hyphens, have length >= 2, and are not stopwords
// (checked on both the surface form and the lemmatized form so that a
// second application is a no-op). Hyphen-connected words stay whole; each
// hyphen segment is lemmatized independently.
std::vector<std::string> standardize_text(std::string_view raw,
                                          const StandardizationConfig& config);

}  // namespace recomb::corpus
