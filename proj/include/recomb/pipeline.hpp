#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "recomb/corpus.hpp"
#include "recomb/dates.hpp"
#include "recomb/knowledge.hpp"
#include "recomb/sim.hpp"

namespace recomb::pipeline {

enum class Outcome { novelty, citations };
enum class Figure { fig1, fig2, fig3 };

// Effective settings for one pipeline run, loaded from a JSON file merged
// over the defaults. The hash of everything except `threads` stamps every
// artifact, so runs that must agree byte-for-byte are comparable.
struct PipelineConfig {
  std::string patents_path = "data/synthetic/patents.jsonl";
  corpus::FileFormat format = corpus::FileFormat::jsonl;
  std::string stopwords_path;  // empty: no stopword list
  std::string lemmas_path;     // empty: suffix rules only
  Date analysis_start = make_date(2009, 1, 1);
  int firm_fe_threshold = 500;
  int citation_window_years = 5;
  knowledge::PairConvention convention = knowledge::PairConvention::ordered;
  bool exclude_self_novelty = false;
  std::vector<double> novelty_quantiles = {0.10, 0.25, 0.50, 0.75,
                                           0.90, 0.95, 0.99};
  std::vector<double> citation_quantiles = {0.90, 0.95, 0.99};
  int regression_max_order = 8;
  int regression_fixed_order = 0;  // > 0 skips order selection
  double absorb_tol = 1e-10;
  int absorb_max_sweeps = 10000;
  int curve_points = 50;    // grid over (0, 0.5]
  int histogram_bins = 50;  // bins over (0, 0.5]
  sim::SimConfig sim;       // sim.seed mirrors `seed`, sim.threads `threads`
  std::uint64_t seed = 20240817;
  std::string output_dir = "out";
  int threads = 1;
};

PipelineConfig default_config();

// Strict load: unknown keys are input errors, values are range-checked.
PipelineConfig load_config(const std::string& path);

// Canonical JSON rendering (fixed key order) of the effective config.
std::string config_to_json(const PipelineConfig& config, bool pretty = true);

// 16-hex-digit digest of the canonical config without the `threads` field.
std::string config_hash(const PipelineConfig& config);

// Artifact base names inside output_dir.
namespace artifact {
inline constexpr const char* corpus = "corpus.bin";
inline constexpr const char* index = "novelty.idx";
inline constexpr const char* patent_novelty = "patent_novelty.csv";
inline constexpr const char* metrics = "patent_metrics.csv";
std::string fit(Outcome outcome);               // fit.json
std::string expectation_curve(Outcome outcome); // curve_expectation.csv
std::string quantile_curves(Outcome outcome);   // curve_quantiles.csv
inline constexpr const char* matches = "matches.csv";
inline constexpr const char* sim_summary = "sim_summary.csv";
}  // namespace artifact

std::string artifact_path(const PipelineConfig& config, const std::string& name);

// Stages. Each reads its inputs from files, so separate processes compose.
void run_ingest(const PipelineConfig& config);
void run_index(const PipelineConfig& config);
void run_metrics(const PipelineConfig& config);
void run_regress(const PipelineConfig& config,
                 Outcome outcome = Outcome::novelty);
void run_quantiles(const PipelineConfig& config,
                   Outcome outcome = Outcome::novelty);
void run_simulate(const PipelineConfig& config);
void run_export(const PipelineConfig& config, Figure which);

// ingest, index, metrics, regress, quantiles in order.
void run_all(const PipelineConfig& config);

}  // namespace recomb::pipeline
