#include "recomb/sim.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

#include "recomb/errors.hpp"

namespace recomb::sim {

void validate(const SimConfig& config) {
  if (config.categories < 1) throw ComputeError("category count must be >= 1");
  if (config.agents_per_category < 2 || config.agents_per_category % 2 != 0)
    throw ComputeError("agents per category must be even and >= 2");
  if (config.knowledge_size < 1)
    throw ComputeError("knowledge size must be >= 1");
  if (!(config.pareto_scale > config.knowledge_size))
    throw ComputeError("pareto scale must exceed the knowledge size");
  if (!(config.pareto_shape > 0.0))
    throw ComputeError("pareto shape must be positive");
  if (!(config.v0 > 0.0) || !(config.c0 > 0.0))
    throw ComputeError("v0 and c0 must be positive");
}

namespace {

double round_half_even(double v) {
  const double f = std::floor(v);
  const double frac = v - f;
  if (frac > 0.5) return f + 1.0;
  if (frac < 0.5) return f;
  return std::fmod(f, 2.0) == 0.0 ? f : f + 1.0;
}

}  // namespace

std::int64_t sample_category_size(const SimConfig& config,
                                  rng::Stream& stream) {
  const double draw = stream.pareto(config.pareto_scale, config.pareto_shape);
  const auto rounded = static_cast<std::int64_t>(round_half_even(draw));
  const std::int64_t floor = config.knowledge_size + 1;
  return std::max(rounded, floor);
}

std::vector<std::int64_t> sample_category_sizes(const SimConfig& config) {
  std::vector<std::int64_t> out(config.categories);
  for (std::int64_t l = 0; l < config.categories; ++l) {
    rng::Stream stream(config.seed, static_cast<std::uint64_t>(l),
                       rng::Purpose::category_size);
    out[l] = sample_category_size(config, stream);
  }
  return out;
}

std::vector<std::int64_t> sample_agent_knowledge(std::int64_t pool, int size,
                                                 rng::Stream& stream) {
  if (pool < size)
    throw ComputeError("knowledge pool smaller than the requested set size");
  // Floyd's sampling: `size` uniform distinct values from [0, pool).
  std::unordered_set<std::int64_t> chosen;
  chosen.reserve(static_cast<std::size_t>(size) * 2);
  for (std::int64_t j = pool - size; j < pool; ++j) {
    const auto t = static_cast<std::int64_t>(
        stream.uniform_int(static_cast<std::uint64_t>(j) + 1));
    chosen.insert(chosen.count(t) ? j : t);
  }
  std::vector<std::int64_t> out(chosen.begin(), chosen.end());
  std::sort(out.begin(), out.end());
  return out;
}

double pairwise_s(const std::vector<std::int64_t>& ki,
                  const std::vector<std::int64_t>& kj) {
  if (ki.size() != kj.size())
    throw ComputeError("knowledge sets must have equal size");
  std::size_t a = 0, b = 0, onesided = 0;
  while (a < ki.size() && b < kj.size()) {
    if (ki[a] < kj[b]) {
      ++onesided;
      ++a;
    } else if (kj[b] < ki[a]) {
      ++b;
    } else {
      ++a;
      ++b;
    }
  }
  onesided += ki.size() - a;
  const auto kd = static_cast<double>(onesided);
  const auto size = static_cast<double>(ki.size());
  return kd == 0.0 ? 0.0 : kd / (size + kd);
}

PairValue net_value(double s, const SimConfig& config, double value_noise,
                    double cost_noise) {
  PairValue v;
  v.s = s;
  double base = config.v0;
  double power = 1.0;
  for (double beta : config.value_coefficients) {
    power *= s;
    base += beta * power;
  }
  v.gross = base * std::exp(value_noise);
  v.cost = config.c0 * s * std::exp(cost_noise);
  v.net = std::max(0.0, v.gross - v.cost);
  return v;
}

std::vector<int> greedy_stable_matching(
    int agents, const std::vector<double>& pair_values) {
  if (agents < 0 || agents % 2 != 0)
    throw ComputeError("matching needs an even agent count");
  const std::size_t pairs =
      static_cast<std::size_t>(agents) * (agents - 1) / 2;
  if (pair_values.size() != pairs)
    throw ComputeError("pair value count does not match the agent count");

  struct Entry {
    double value;
    int i, j;
  };
  std::vector<Entry> entries;
  entries.reserve(pairs);
  for (int i = 0; i < agents; ++i)
    for (int j = i + 1; j < agents; ++j)
      entries.push_back({pair_values[pair_index(agents, i, j)], i, j});
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.value != b.value) return a.value > b.value;
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
  });

  // Scanning the sorted list and taking every pair whose endpoints are both
  // free reproduces "extract the max pair, remove, repeat".
  std::vector<int> partner(agents, -1);
  int matched = 0;
  for (const Entry& e : entries) {
    if (partner[e.i] != -1 || partner[e.j] != -1) continue;
    partner[e.i] = e.j;
    partner[e.j] = e.i;
    matched += 2;
    if (matched == agents) break;
  }
  return partner;
}

SimResult run_simulation(const SimConfig& config) {
  validate(config);
  const auto cats = static_cast<std::size_t>(config.categories);
  const int agents = config.agents_per_category;
  const int per_cat = agents / 2;

  std::vector<std::vector<MatchRecord>> slots(cats);
  std::vector<std::int64_t> pools(cats);

  auto run_category = [&](std::size_t l) {
    const auto unit = static_cast<std::uint64_t>(l);
    rng::Stream size_stream(config.seed, unit, rng::Purpose::category_size);
    const std::int64_t pool = sample_category_size(config, size_stream);
    pools[l] = pool;

    rng::Stream know_stream(config.seed, unit, rng::Purpose::agent_knowledge);
    std::vector<std::vector<std::int64_t>> knowledge(agents);
    for (int i = 0; i < agents; ++i)
      knowledge[i] =
          sample_agent_knowledge(pool, config.knowledge_size, know_stream);

    rng::Stream value_stream(config.seed, unit, rng::Purpose::value_noise);
    rng::Stream cost_stream(config.seed, unit, rng::Purpose::cost_noise);
    std::vector<PairValue> values;
    std::vector<double> nets;
    values.reserve(pair_index(agents, agents - 2, agents - 1) + 1);
    for (int i = 0; i < agents; ++i)
      for (int j = i + 1; j < agents; ++j) {
        const double s = pairwise_s(knowledge[i], knowledge[j]);
        values.push_back(
            net_value(s, config, value_stream.normal(), cost_stream.normal()));
        nets.push_back(values.back().net);
      }

    std::vector<int> partner = greedy_stable_matching(agents, nets);
    slots[l].reserve(per_cat);
    for (int i = 0; i < agents; ++i) {
      const int j = partner[i];
      if (j < i) continue;
      const PairValue& v = values[pair_index(agents, i, j)];
      MatchRecord rec;
      rec.category = static_cast<std::int64_t>(l);
      rec.i = i;
      rec.j = j;
      rec.s = v.s;
      rec.gross = v.gross;
      rec.cost = v.cost;
      rec.net = v.net;
      rec.active = v.net > 0.0;
      slots[l].push_back(rec);
    }
  };

  if (config.threads == 1) {
    for (std::size_t l = 0; l < cats; ++l) run_category(l);
  } else {
#pragma omp parallel for schedule(dynamic, 4) num_threads(config.threads)
    for (std::size_t l = 0; l < cats; ++l) run_category(l);
  }

  SimResult out;
  out.records.reserve(cats * static_cast<std::size_t>(per_cat));
  for (auto& slot : slots)
    out.records.insert(out.records.end(), slot.begin(), slot.end());

  SimSummary& sum = out.summary;
  sum.categories = config.categories;
  sum.agents = config.categories * agents;
  sum.matches = static_cast<std::int64_t>(out.records.size());
  double pool_total = 0.0;
  for (std::int64_t p : pools) pool_total += static_cast<double>(p);
  sum.mean_pool = pool_total / static_cast<double>(cats);
  double s_total = 0.0, s_active = 0.0;
  double s_min = 1.0, s_max = 0.0;
  for (const MatchRecord& r : out.records) {
    s_total += r.s;
    s_min = std::min(s_min, r.s);
    s_max = std::max(s_max, r.s);
    if (r.active) {
      ++sum.active_matches;
      s_active += r.s;
    }
  }
  sum.mean_matched_s = sum.matches ? s_total / sum.matches : 0.0;
  sum.mean_active_s = sum.active_matches ? s_active / sum.active_matches : 0.0;
  sum.min_matched_s = sum.matches ? s_min : 0.0;
  sum.max_matched_s = sum.matches ? s_max : 0.0;
  return out;
}

std::vector<double> feasible_s_set(int size) {
  if (size < 1) throw ComputeError("knowledge size must be >= 1");
  std::vector<double> out;
  out.reserve(size + 1);
  for (int kd = 0; kd <= size; ++kd)
    out.push_back(static_cast<double>(kd) / static_cast<double>(size + kd));
  return out;
}

std::vector<double> optimal_s(int size,
                              const std::function<double(double)>& value,
                              const std::function<double(double)>& cost) {
  const std::vector<double> feasible = feasible_s_set(size);
  double best = -std::numeric_limits<double>::infinity();
  for (double s : feasible) best = std::max(best, value(s) - cost(s));
  std::vector<double> out;
  for (double s : feasible)
    if (value(s) - cost(s) == best) out.push_back(s);
  return out;
}

}  // namespace recomb::sim
