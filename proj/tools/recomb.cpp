// Command-line front end: each subcommand runs one pipeline stage against a
// JSON config, reading earlier stages' artifacts from the output directory.
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "recomb/csv.hpp"
#include "recomb/errors.hpp"
#include "recomb/pipeline.hpp"
#include "recomb/sim.hpp"

namespace {

constexpr const char* kArtifactHelp = R"(Artifacts (written to output_dir; CSV files start with one
"# recomb v1 config <hash>" comment line):

  corpus.bin            parsed + tokenized corpus (binary)
  novelty.idx     chronological pair index (binary)
  patent_novelty.csv    id, date, W_p (word-pair count), novelty (mean pair
                        rarity at the filing date)
  patent_metrics.csv    id, date, year, firm, ipc_class, H_p (inventors),
                        M_p (inventor pairs), W_p (word pairs), n_p (novelty
                        per inventor pair), s_p (mean knowledge
                        differentiation in [0, 0.5]), Kbar_p (mean knowledge
                        set size), c_p (external citations within the window
                        per inventor pair), flag_empty_pairs (1 if some
                        inventor pair had no prior knowledge)
  fit.json              chosen polynomial order, coefficients, clustered
                        standard errors, BIC table, group counts
                        (fit_citations.json for --outcome citations)
  curve_expectation.csv s, fit, lo95, hi95 (controls at sample means)
  curve_quantiles.csv   tau, s, fit
  matches.csv           category, i, j, s, gross, cost, A (net value),
                        active (1 if A > 0)
  sim_summary.csv       categories, agents, matches, active_matches,
                        mean_pool, mean_matched_s, mean_active_s,
                        min_matched_s, max_matched_s
  fig1_histogram.csv    bin_lo, bin_hi, count of s_p > 0
  fig1_expectation.csv / fig1_quantiles.csv   plot-ready curve copies
  fig2_expectation.csv / fig2_quantiles.csv   citation-outcome curves
  fig3_matched_s.csv    bin_lo, bin_hi, count of matched s > 0
  fig3_value_quantiles.csv  tau, s, fit (gross value of active matches)

Exit codes: 0 success, 1 computation error, 2 usage or input error.)";

recomb::pipeline::PipelineConfig effective_config(const std::string& path,
                                                  int threads) {
  recomb::pipeline::PipelineConfig config =
      path.empty() ? recomb::pipeline::default_config()
                   : recomb::pipeline::load_config(path);
  if (threads > 0) {
    config.threads = threads;
    config.sim.threads = threads;
  }
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"recomb: word-pair novelty metrics, differentiation "
               "regressions, and pair-matching simulation"};
  app.footer(kArtifactHelp);
  app.require_subcommand(1);

  std::string config_path;
  int threads = 0;
  std::string outcome = "novelty";
  std::string figure;

  auto add_stage = [&](const char* name, const char* desc,
                       bool config_required = true) {
    CLI::App* sub = app.add_subcommand(name, desc);
    auto* opt = sub->add_option("-c,--config", config_path,
                                "pipeline config JSON file");
    if (config_required) opt->required();
    sub->add_option("-t,--threads", threads,
                    "worker threads (overrides the config; not part of the "
                    "config hash)");
    return sub;
  };

  CLI::App* ingest =
      add_stage("ingest", "parse and tokenize the patent file into corpus.bin");
  CLI::App* index = add_stage(
      "index", "build novelty.idx and patent_novelty.csv from the corpus");
  CLI::App* metrics = add_stage(
      "metrics",
      "chronological sweep producing patent_metrics.csv (novelty, "
      "differentiation, knowledge size, citations per inventor pair)");
  CLI::App* regress = add_stage(
      "regress",
      "polynomial fit of the outcome on s with Kbar/M controls, absorbed "
      "firm/ipc/year effects, clustered errors, BIC order choice");
  regress->add_option("--outcome", outcome, "novelty or citations")
      ->check(CLI::IsMember({"novelty", "citations"}));
  CLI::App* quantiles = add_stage(
      "quantiles", "quantile curves for the outcome at the configured levels");
  quantiles->add_option("--outcome", outcome, "novelty or citations")
      ->check(CLI::IsMember({"novelty", "citations"}));
  CLI::App* simulate = add_stage(
      "simulate", "category matching simulation writing matches.csv and "
                  "sim_summary.csv");
  std::string fit_path;
  simulate->add_option(
      "--fit", fit_path,
      "splice the polynomial coefficients of this fit.json into the "
      "simulation's value function (order must be <= 4)");

  CLI::App* optimal = app.add_subcommand(
      "optimal-s", "print the feasible differentiation values for a given "
                   "knowledge size and the maximizers of value minus cost");
  int opt_size = 100;
  double opt_v0 = -1.0, opt_c0 = -1.0;
  std::vector<double> opt_coefficients;
  optimal->add_option("-c,--config", config_path,
                      "take v0/c0/coefficients from this config's sim block");
  optimal->add_option("-k,--knowledge-size", opt_size, "set size (default 100)")
      ->check(CLI::PositiveNumber);
  optimal->add_option("--v0", opt_v0, "value intercept override");
  optimal->add_option("--c0", opt_c0, "cost slope override");
  optimal
      ->add_option("--coefficients", opt_coefficients,
                   "four polynomial value coefficients")
      ->expected(4);

  CLI::App* exporter = add_stage(
      "export-figure-data",
      "write plot-ready CSV bundles from already produced artifacts");
  exporter->add_option("-f,--figure", figure, "fig1, fig2, or fig3")
      ->required()
      ->check(CLI::IsMember({"fig1", "fig2", "fig3"}));

  CLI::App* config_cmd = app.add_subcommand(
      "config", "print the effective configuration as canonical JSON");
  bool show_defaults = false;
  config_cmd->add_flag("--defaults", show_defaults,
                       "print the built-in defaults");
  config_cmd->add_option("-c,--config", config_path,
                         "config file to load and echo back merged over the "
                         "defaults");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  using recomb::pipeline::Figure;
  using recomb::pipeline::Outcome;
  try {
    const Outcome out_kind =
        outcome == "novelty" ? Outcome::novelty : Outcome::citations;
    if (ingest->parsed()) {
      recomb::pipeline::run_ingest(effective_config(config_path, threads));
    } else if (index->parsed()) {
      recomb::pipeline::run_index(effective_config(config_path, threads));
    } else if (metrics->parsed()) {
      recomb::pipeline::run_metrics(effective_config(config_path, threads));
    } else if (regress->parsed()) {
      recomb::pipeline::run_regress(effective_config(config_path, threads),
                                    out_kind);
    } else if (quantiles->parsed()) {
      recomb::pipeline::run_quantiles(effective_config(config_path, threads),
                                      out_kind);
    } else if (simulate->parsed()) {
      recomb::pipeline::PipelineConfig config =
          effective_config(config_path, threads);
      if (!fit_path.empty()) {
        std::ifstream in(fit_path);
        if (!in) throw recomb::InputError("cannot open fit file: " + fit_path);
        const auto fit = nlohmann::json::parse(in);
        const int order = fit.at("order").get<int>();
        if (order < 1 || order > 4)
          throw recomb::InputError(
              "fit order " + std::to_string(order) +
              " cannot be spliced into the quartic value function");
        config.sim.value_coefficients = {0.0, 0.0, 0.0, 0.0};
        for (int k = 1; k <= order; ++k)
          config.sim.value_coefficients[k - 1] =
              fit.at("coefficients").at("s^" + std::to_string(k)).get<double>();
      }
      recomb::pipeline::run_simulate(config);
    } else if (optimal->parsed()) {
      recomb::pipeline::PipelineConfig config =
          effective_config(config_path, threads);
      recomb::sim::SimConfig sim = config.sim;
      sim.knowledge_size = opt_size;
      if (opt_v0 > 0.0) sim.v0 = opt_v0;
      if (opt_c0 > 0.0) sim.c0 = opt_c0;
      if (!opt_coefficients.empty())
        for (int k = 0; k < 4; ++k)
          sim.value_coefficients[k] = opt_coefficients[k];
      auto value = [&sim](double s) {
        double v = sim.v0, power = 1.0;
        for (double beta : sim.value_coefficients) {
          power *= s;
          v += beta * power;
        }
        return v;
      };
      auto cost = [&sim](double s) { return sim.c0 * s; };
      std::cout << "feasible_s:";
      for (double s : recomb::sim::feasible_s_set(sim.knowledge_size))
        std::cout << ' ' << recomb::format_double(s);
      std::cout << "\noptimal_s:";
      for (double s :
           recomb::sim::optimal_s(sim.knowledge_size, value, cost))
        std::cout << ' ' << recomb::format_double(s);
      std::cout << '\n';
    } else if (exporter->parsed()) {
      const Figure which = figure == "fig1"   ? Figure::fig1
                           : figure == "fig2" ? Figure::fig2
                                              : Figure::fig3;
      recomb::pipeline::run_export(effective_config(config_path, threads),
                                   which);
    } else if (config_cmd->parsed()) {
      recomb::pipeline::PipelineConfig config =
          show_defaults ? recomb::pipeline::default_config()
                        : effective_config(config_path, threads);
      std::cout << recomb::pipeline::config_to_json(config);
      std::cerr << "config hash: " << recomb::pipeline::config_hash(config)
                << "\n";
    }
  } catch (const recomb::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
