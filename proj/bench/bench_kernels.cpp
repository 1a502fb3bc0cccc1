// Serial reference vs OpenMP variants of the heavy kernels. Run with
// --benchmark_filter to focus on one kernel; the /1 variants are the serial
// baselines the tests compare against.
#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "recomb/corpus.hpp"
#include "recomb/econ.hpp"
#include "recomb/knowledge.hpp"
#include "recomb/novelty.hpp"
#include "recomb/rng.hpp"
#include "recomb/sim.hpp"

namespace {

using namespace recomb;

corpus::Corpus synth_corpus(int patents, int vocab, int words_per_patent) {
  rng::Stream r(7031);
  std::vector<corpus::PatentRecord> records(patents);
  const Date base = make_date(1995, 1, 1);
  for (int p = 0; p < patents; ++p) {
    auto& rec = records[p];
    rec.patent_id = "B" + std::to_string(p);
    rec.filing_date = Date{base.days + static_cast<std::int32_t>(p / 3)};
    std::string text;
    for (int k = 0; k < words_per_patent; ++k) {
      if (!text.empty()) text += ' ';
      text += "word" + std::to_string(r.uniform_int(vocab));
    }
    rec.abstract = text;
    rec.firm_id = "F" + std::to_string(r.uniform_int(40));
    rec.ipc = "G06F1/00";
    const int team = 2 + static_cast<int>(r.uniform_int(3));
    for (int i = 0; i < team; ++i)
      rec.inventor_ids.push_back("i" + std::to_string(r.uniform_int(300)));
  }
  return corpus::build_corpus(std::move(records),
                              corpus::StandardizationConfig{}, 4);
}

const corpus::Corpus& shared_corpus() {
  static corpus::Corpus c = synth_corpus(4000, 600, 30);
  return c;
}

void bm_index_build(benchmark::State& state) {
  const auto& c = shared_corpus();
  const auto inputs = novelty::sorted_inputs(c);
  for (auto _ : state) {
    auto index = novelty::NoveltyIndex::build(inputs, c.pairs.size(),
                                              static_cast<int>(state.range(0)));
    benchmark::DoNotOptimize(index.total_slots(make_date(2010, 1, 1)));
  }
}
BENCHMARK(bm_index_build)->Arg(1)->Arg(8)->Unit(benchmark::kMillisecond);

void bm_metrics_sweep(benchmark::State& state) {
  const auto& c = shared_corpus();
  const auto inputs = novelty::sorted_inputs(c);
  const auto index = novelty::NoveltyIndex::build(inputs, c.pairs.size(), 8);
  knowledge::SweepOptions options;
  options.threads = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto rows = knowledge::run_sweep(c, index, options);
    benchmark::DoNotOptimize(rows.size());
  }
}
BENCHMARK(bm_metrics_sweep)->Arg(1)->Arg(8)->Unit(benchmark::kMillisecond);

void bm_simulation(benchmark::State& state) {
  sim::SimConfig config;
  config.categories = 60;
  config.threads = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto result = sim::run_simulation(config);
    benchmark::DoNotOptimize(result.summary.mean_matched_s);
  }
}
BENCHMARK(bm_simulation)->Arg(1)->Arg(8)->Unit(benchmark::kMillisecond);

void bm_absorb(benchmark::State& state) {
  rng::Stream r(99);
  const int n = 20000, cols = 6;
  Eigen::MatrixXd design(n, cols);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < cols; ++j) design(i, j) = r.normal();
  std::vector<std::vector<std::int32_t>> groups(3);
  for (auto& g : groups) g.resize(n);
  for (int i = 0; i < n; ++i) {
    groups[0][i] = static_cast<std::int32_t>(r.uniform_int(400));
    groups[1][i] = static_cast<std::int32_t>(r.uniform_int(50));
    groups[2][i] = static_cast<std::int32_t>(r.uniform_int(25));
  }
  for (auto _ : state) {
    auto out = econ::absorb_fixed_effects(design, groups, 1e-10, 10000,
                                          nullptr, static_cast<int>(state.range(0)));
    benchmark::DoNotOptimize(out.sum());
  }
}
BENCHMARK(bm_absorb)->Arg(1)->Arg(8)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
