#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "recomb/rng.hpp"

namespace recomb::sim {

struct SimConfig {
  std::int64_t categories = 200;  // L
  int agents_per_category = 20;   // even
  int knowledge_size = 100;       // shared set size of every agent
  double pareto_scale = 101.0;    // category pool size draw, > knowledge_size
  double pareto_shape = 2.0;
  double v0 = 3.5e7;
  double c0 = 3.5e7;
  // Quartic gross-value coefficients on s, absolute units matching v0.
  std::array<double, 4> value_coefficients = {7.0e7, 2.1e8, -3.5e8, -7.0e8};
  std::uint64_t seed = 20240817;
  int threads = 1;
};

void validate(const SimConfig& config);  // throws ComputeError on bad fields

// Pool size draw: half-even rounding of scale / U^(1/shape), clamped so the
// pool strictly exceeds the agent knowledge size.
std::int64_t sample_category_size(const SimConfig& config, rng::Stream& stream);
std::vector<std::int64_t> sample_category_sizes(const SimConfig& config);

// Uniform sample of `size` distinct ids from {0..pool-1}, sorted ascending.
std::vector<std::int64_t> sample_agent_knowledge(std::int64_t pool, int size,
                                                 rng::Stream& stream);

// s = KD / (size + KD) with KD the one-sided set difference; both sets must
// be sorted and equally sized.
double pairwise_s(const std::vector<std::int64_t>& ki,
                  const std::vector<std::int64_t>& kj);

struct PairValue {
  double s = 0.0;
  double gross = 0.0;  // (v0 + sum_k beta_k s^k) * exp(value noise)
  double cost = 0.0;   // c0 * s * exp(cost noise)
  double net = 0.0;    // max(0, gross - cost)
};

PairValue net_value(double s, const SimConfig& config, double value_noise,
                    double cost_noise);

// Repeatedly matches the highest-value free pair; ties break toward the
// lexicographically smallest (i, j). Returns partner[i] for each agent.
// Agent count must be even.
std::vector<int> greedy_stable_matching(int agents,
                                        const std::vector<double>& pair_values);

// Index of pair (i, j), i < j, in the lexicographic pair enumeration.
inline std::size_t pair_index(int agents, int i, int j) {
  auto n = static_cast<std::size_t>(agents);
  auto a = static_cast<std::size_t>(i);
  return a * n - a * (a + 1) / 2 + static_cast<std::size_t>(j - i - 1);
}

struct MatchRecord {
  std::int64_t category = 0;
  int i = 0;
  int j = 0;
  double s = 0.0;
  double gross = 0.0;
  double cost = 0.0;
  double net = 0.0;
  bool active = false;  // net > 0
};

struct SimSummary {
  std::int64_t categories = 0;
  std::int64_t agents = 0;
  std::int64_t matches = 0;
  std::int64_t active_matches = 0;
  double mean_pool = 0.0;
  double mean_matched_s = 0.0;
  double mean_active_s = 0.0;
  double min_matched_s = 0.0;
  double max_matched_s = 0.0;
};

struct SimResult {
  std::vector<MatchRecord> records;  // ordered by category, then i
  SimSummary summary;
};

// Per category: draw the pool size, the agents' knowledge sets, pairwise
// values with independent noise streams, then match greedily. Categories are
// independent work units; identical seeds give identical records at any
// thread count.
SimResult run_simulation(const SimConfig& config);

// The s values reachable by equally sized sets: KD/(KD+size), KD = 0..size.
std::vector<double> feasible_s_set(int size);

// All maximizers of value(s) - cost(s) over the feasible set.
std::vector<double> optimal_s(int size,
                              const std::function<double(double)>& value,
                              const std::function<double(double)>& cost);

}  // namespace recomb::sim
