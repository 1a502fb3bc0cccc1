#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "recomb/corpus.hpp"
#include "recomb/dates.hpp"
#include "recomb/novelty.hpp"

namespace recomb::knowledge {

using corpus::PairId;

// An inventor's accumulated word pairs as of some date.
struct KnowledgeSet {
  std::string owner;
  Date as_of;
  std::vector<PairId> pairs;  // sorted ascending

  bool empty() const { return pairs.empty(); }
};

// Sum of n_wt over a sorted pair-id set; 0 for an empty set.
double novelty_mass(const novelty::NoveltyIndex& index,
                    std::span<const PairId> pairs, Date t);

struct Differentiation {
  double s = 0.0;
  bool both_empty = false;  // s assigned 0 by convention, flagged
};

// s_ijt = sqrt(kD_ij * kD_ji) / k_ij, clamped into [0, 0.5]. A pair of
// empty sets is undefined; compute_differentiation flags it instead of
// throwing so team metrics stay defined.
Differentiation compute_differentiation(const novelty::NoveltyIndex& index,
                                        std::span<const PairId> ki,
                                        std::span<const PairId> kj, Date t);

// Throwing variant of the above (both sets empty -> ComputeError).
double pair_differentiation(const novelty::NoveltyIndex& index,
                            const KnowledgeSet& ki, const KnowledgeSet& kj,
                            Date t);

enum class PairConvention { ordered, unordered };

// M_p under the configured convention: H(H-1) ordered, H(H-1)/2 unordered.
inline std::uint32_t pair_count(std::uint32_t inventors, PairConvention conv) {
  std::uint32_t m = inventors * (inventors - 1);
  return conv == PairConvention::ordered ? m : m / 2;
}

struct PatentMetrics {
  std::string patent_id;
  Date date;
  std::string firm_id;
  std::string ipc_class;
  std::uint32_t inventor_count = 0;   // H_p
  std::uint32_t pair_count = 0;       // M_p
  std::uint32_t word_pairs = 0;       // W_p
  double novelty = 0.0;               // patent novelty (mean n_wt)
  double pairwise_novelty = 0.0;      // n_p = novelty / M_p
  double differentiation = 0.0;       // s_p in [0, 0.5]
  double mean_knowledge = 0.0;        // Kbar_p, mean set cardinality
  std::optional<double> citations_per_pair;  // c_p, after the citation pass
  bool has_empty_pair = false;        // some inventor pair had no history
};

struct SweepOptions {
  PairConvention convention = PairConvention::ordered;
  bool exclude_self_novelty = false;
  // Patents dated before this emit no metrics but still feed knowledge.
  std::optional<Date> analysis_start;
  int threads = 1;
};

// Chronological sweep over date-sorted records: metrics for each patent are
// computed against knowledge accumulated strictly before its date, then the
// patent's pairs merge into its inventors' sets. Single-inventor patents and
// patents without word pairs accumulate knowledge but emit no metrics.
std::vector<PatentMetrics> run_sweep(const corpus::Corpus& corpus,
                                     const novelty::NoveltyIndex& index,
                                     const SweepOptions& options);

// Knowledge of one inventor strictly before t (empty for unknown inventors).
KnowledgeSet inventor_knowledge(const corpus::Corpus& corpus,
                                const std::string& inventor, Date t);

struct NestingResult {
  bool ok = false;
  std::vector<std::size_t> order;  // chain witness K[order[0]] c= K[order[1]] ...
  std::size_t bad_i = 0, bad_j = 0;  // a non-nested pair when !ok
};

// Tries to witness K_1 c= K_2 c= ... by cardinality order. When every
// pairwise differentiation is 0 this must succeed; a failure returns a
// concrete non-nested pair.
NestingResult nesting_witness(
    const std::vector<std::vector<PairId>>& sets);

struct CitationOptions {
  int window_years = 5;
  PairConvention convention = PairConvention::ordered;
};

// c_p = (citations within the window, excluding patents sharing any
// inventor) / M_p for each record, keyed by record index.
std::vector<double> citation_metrics(const corpus::Corpus& corpus,
                                     const CitationOptions& options);

// Citation count for a single patent (the numerator, before dividing by M_p).
std::uint32_t citation_count(const corpus::Corpus& corpus,
                             std::size_t record_index, int window_years);

}  // namespace recomb::knowledge
