#include "recomb/knowledge.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>

#include "recomb/errors.hpp"

namespace recomb::knowledge {

double novelty_mass(const novelty::NoveltyIndex& index,
                    std::span<const PairId> pairs, Date t) {
  double sum = 0.0;
  for (PairId w : pairs) sum += index.pair_novelty(w, t).value();
  return sum;
}

Differentiation compute_differentiation(const novelty::NoveltyIndex& index,
                                        std::span<const PairId> ki,
                                        std::span<const PairId> kj, Date t) {
  if (ki.empty() && kj.empty()) return {0.0, true};
  double only_i = 0.0, only_j = 0.0, both = 0.0;
  std::size_t a = 0, b = 0;
  while (a < ki.size() || b < kj.size()) {
    if (b == kj.size() || (a < ki.size() && ki[a] < kj[b])) {
      only_i += index.pair_novelty(ki[a], t).value();
      ++a;
    } else if (a == ki.size() || kj[b] < ki[a]) {
      only_j += index.pair_novelty(kj[b], t).value();
      ++b;
    } else {
      both += index.pair_novelty(ki[a], t).value();
      ++a;
      ++b;
    }
  }
  double unio = only_i + only_j + both;
  double s = std::sqrt(only_i * only_j) / unio;
  return {std::clamp(s, 0.0, 0.5), false};
}

double pair_differentiation(const novelty::NoveltyIndex& index,
                            const KnowledgeSet& ki, const KnowledgeSet& kj,
                            Date t) {
  Differentiation d = compute_differentiation(index, ki.pairs, kj.pairs, t);
  if (d.both_empty)
    throw ComputeError("differentiation undefined: both knowledge sets empty");
  return d.s;
}

namespace {

std::vector<PairId> merge_sorted(const std::vector<PairId>& base,
                                 std::span<const PairId> add) {
  std::vector<PairId> out;
  out.reserve(base.size() + add.size());
  std::set_union(base.begin(), base.end(), add.begin(), add.end(),
                 std::back_inserter(out));
  return out;
}

}  // namespace

std::vector<PatentMetrics> run_sweep(const corpus::Corpus& corpus,
                                     const novelty::NoveltyIndex& index,
                                     const SweepOptions& options) {
  // Date-sorted view (stable: file order breaks ties).
  std::vector<std::size_t> order(corpus.records.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return corpus.records[a].filing_date < corpus.records[b].filing_date;
  });

  std::unordered_map<std::string_view, std::vector<PairId>> state;
  std::vector<PatentMetrics> out;
  const std::vector<PairId> kEmpty;

  auto knowledge_of = [&](const std::string& inventor)
      -> const std::vector<PairId>& {
    auto it = state.find(std::string_view(inventor));
    return it == state.end() ? kEmpty : it->second;
  };

  std::size_t g = 0;
  while (g < order.size()) {
    std::size_t g_end = g;
    Date d = corpus.records[order[g]].filing_date;
    while (g_end < order.size() &&
           corpus.records[order[g_end]].filing_date == d)
      ++g_end;

    // Metrics against the frozen strictly-before-d state.
    bool emit = !options.analysis_start || d >= *options.analysis_start;
    if (emit) {
      std::vector<std::optional<PatentMetrics>> rows(g_end - g);
      auto compute_one = [&](std::size_t k) {
        const auto& rec = corpus.records[order[g + k]];
        const auto& pairs = corpus.tokenized[order[g + k]].pairs;
        const std::uint32_t h =
            static_cast<std::uint32_t>(rec.inventor_ids.size());
        if (h < 2 || pairs.empty()) return;
        PatentMetrics m;
        m.patent_id = rec.patent_id;
        m.date = d;
        m.firm_id = rec.firm_id;
        m.ipc_class = corpus::ipc_class_of(rec);
        m.inventor_count = h;
        m.pair_count = pair_count(h, options.convention);
        m.word_pairs = static_cast<std::uint32_t>(pairs.size());
        auto report =
            index.patent_novelty(d, pairs, options.exclude_self_novelty);
        m.novelty = report.novelty;
        m.pairwise_novelty = report.novelty / m.pair_count;
        double s_sum = 0.0;
        std::size_t n_pairs = 0;
        double k_sum = 0.0;
        for (std::size_t i = 0; i < h; ++i) {
          const auto& ki = knowledge_of(rec.inventor_ids[i]);
          k_sum += static_cast<double>(ki.size());
          for (std::size_t j = i + 1; j < h; ++j) {
            const auto& kj = knowledge_of(rec.inventor_ids[j]);
            Differentiation diff = compute_differentiation(index, ki, kj, d);
            if (diff.both_empty) m.has_empty_pair = true;
            s_sum += diff.s;
            ++n_pairs;
          }
        }
        m.differentiation = n_pairs ? s_sum / static_cast<double>(n_pairs) : 0.0;
        m.mean_knowledge = k_sum / h;
        rows[k] = std::move(m);
      };
      if (options.threads == 1 || g_end - g < 2) {
        for (std::size_t k = 0; k < g_end - g; ++k) compute_one(k);
      } else {
#pragma omp parallel for schedule(dynamic, 8) num_threads(options.threads)
        for (std::size_t k = 0; k < g_end - g; ++k) compute_one(k);
      }
      for (auto& row : rows)
        if (row) out.push_back(std::move(*row));
    }

    // Merge the whole date group, in record order.
    for (std::size_t k = g; k < g_end; ++k) {
      const auto& rec = corpus.records[order[k]];
      const auto& pairs = corpus.tokenized[order[k]].pairs;
      if (pairs.empty()) continue;
      for (const auto& inventor : rec.inventor_ids) {
        auto [it, inserted] =
            state.try_emplace(std::string_view(inventor), std::vector<PairId>{});
        it->second = merge_sorted(it->second, pairs);
      }
    }
    g = g_end;
  }
  return out;
}

KnowledgeSet inventor_knowledge(const corpus::Corpus& corpus,
                                const std::string& inventor, Date t) {
  KnowledgeSet set;
  set.owner = inventor;
  set.as_of = t;
  for (std::size_t i = 0; i < corpus.records.size(); ++i) {
    const auto& rec = corpus.records[i];
    if (!(rec.filing_date < t)) continue;
    if (std::find(rec.inventor_ids.begin(), rec.inventor_ids.end(), inventor) ==
        rec.inventor_ids.end())
      continue;
    set.pairs = merge_sorted(set.pairs, corpus.tokenized[i].pairs);
  }
  return set;
}

NestingResult nesting_witness(const std::vector<std::vector<PairId>>& sets) {
  NestingResult res;
  res.order.resize(sets.size());
  for (std::size_t i = 0; i < sets.size(); ++i) res.order[i] = i;
  std::stable_sort(res.order.begin(), res.order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return sets[a].size() < sets[b].size();
                   });
  for (std::size_t k = 0; k + 1 < res.order.size(); ++k) {
    const auto& small = sets[res.order[k]];
    const auto& big = sets[res.order[k + 1]];
    if (!std::includes(big.begin(), big.end(), small.begin(), small.end())) {
      // |small| <= |big| and small !c= big, so neither contains the other.
      res.ok = false;
      res.bad_i = res.order[k];
      res.bad_j = res.order[k + 1];
      return res;
    }
  }
  res.ok = true;
  return res;
}

std::uint32_t citation_count(const corpus::Corpus& corpus,
                             std::size_t record_index, int window_years) {
  const auto& target = corpus.records[record_index];
  Date cutoff = add_years(target.filing_date, window_years);
  std::uint32_t count = 0;
  for (const auto& q : corpus.records) {
    if (&q == &target) continue;
    if (q.filing_date < target.filing_date || cutoff < q.filing_date) continue;
    if (std::find(q.cited_ids.begin(), q.cited_ids.end(), target.patent_id) ==
        q.cited_ids.end())
      continue;
    bool overlap = false;
    for (const auto& inv : q.inventor_ids) {
      if (std::find(target.inventor_ids.begin(), target.inventor_ids.end(),
                    inv) != target.inventor_ids.end()) {
        overlap = true;
        break;
      }
    }
    if (!overlap) ++count;
  }
  return count;
}

std::vector<double> citation_metrics(const corpus::Corpus& corpus,
                                     const CitationOptions& options) {
  // Incoming-citation adjacency, built once.
  std::unordered_map<std::string_view, std::vector<std::uint32_t>> incoming;
  for (std::uint32_t q = 0; q < corpus.records.size(); ++q)
    for (const auto& cited : corpus.records[q].cited_ids)
      incoming[std::string_view(cited)].push_back(q);

  std::vector<double> out(corpus.records.size(), 0.0);
  for (std::size_t p = 0; p < corpus.records.size(); ++p) {
    const auto& target = corpus.records[p];
    std::uint32_t h = static_cast<std::uint32_t>(target.inventor_ids.size());
    if (h < 2) continue;  // M_p = 0: c_p undefined, row excluded upstream
    Date cutoff = add_years(target.filing_date, options.window_years);
    std::uint32_t cites = 0;
    if (auto it = incoming.find(std::string_view(target.patent_id));
        it != incoming.end()) {
      for (std::uint32_t qi : it->second) {
        const auto& q = corpus.records[qi];
        if (qi == p) continue;
        if (q.filing_date < target.filing_date || cutoff < q.filing_date)
          continue;
        bool overlap = false;
        for (const auto& inv : q.inventor_ids) {
          if (std::find(target.inventor_ids.begin(), target.inventor_ids.end(),
                        inv) != target.inventor_ids.end()) {
            overlap = true;
            break;
          }
        }
        if (!overlap) ++cites;
      }
    }
    out[p] = static_cast<double>(cites) /
             static_cast<double>(pair_count(h, options.convention));
  }
  return out;
}

}  // namespace recomb::knowledge
