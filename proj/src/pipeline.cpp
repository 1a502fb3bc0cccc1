#include "recomb/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <unordered_map>

#include "json.hpp"
#include "recomb/csv.hpp"
#include "recomb/econ.hpp"
#include "recomb/errors.hpp"
#include "recomb/novelty.hpp"

namespace recomb::pipeline {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

PipelineConfig default_config() {
  PipelineConfig c;
  c.sim.seed = c.seed;
  c.sim.threads = c.threads;
  return c;
}

namespace {

double parse_double_field(const std::string& field, const std::string& what) {
  double v = 0.0;
  const char* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (ec != std::errc() || ptr != end)
    throw InputError("cannot parse " + what + " from '" + field + "'");
  return v;
}

long long parse_int_field(const std::string& field, const std::string& what) {
  long long v = 0;
  const char* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (ec != std::errc() || ptr != end)
    throw InputError("cannot parse " + what + " from '" + field + "'");
  return v;
}

void check_known_keys(const ordered_json& obj, const char* where,
                      std::initializer_list<const char*> known) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* k : known)
      if (key == k) ok = true;
    if (!ok)
      throw InputError(std::string("unknown config key '") + key + "' in " +
                       where);
  }
}

std::vector<double> parse_quantile_list(const ordered_json& arr,
                                        const char* what) {
  if (!arr.is_array()) throw InputError(std::string(what) + " must be an array");
  std::vector<double> out;
  for (const auto& v : arr) {
    const double q = v.get<double>();
    if (!(q > 0.0 && q < 1.0))
      throw InputError(std::string(what) + " entries must lie in (0, 1)");
    out.push_back(q);
  }
  if (out.empty()) throw InputError(std::string(what) + " must be non-empty");
  return out;
}

}  // namespace

namespace {

PipelineConfig apply_config(const ordered_json& j);

}  // namespace

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file " + path);
  ordered_json j;
  try {
    j = ordered_json::parse(in);
  } catch (const std::exception& e) {
    throw InputError("config " + path + ": " + e.what());
  }
  try {
    return apply_config(j);
  } catch (const nlohmann::json::exception& e) {
    throw InputError("config " + path + ": " + e.what());
  } catch (const InputError& e) {
    throw InputError("config " + path + ": " + e.what());
  }
}

namespace {

PipelineConfig apply_config(const ordered_json& j) {
  PipelineConfig c = default_config();
  check_known_keys(j, "config",
                   {"input", "analysis_start", "firm_fe_threshold",
                    "citation_window_years", "pair_convention",
                    "exclude_self_novelty", "quantiles", "regression",
                    "curve_points", "histogram_bins", "sim", "seed",
                    "output_dir", "threads"});

  if (j.contains("input")) {
    const auto& in_obj = j["input"];
    check_known_keys(in_obj, "input", {"patents", "format", "stopwords",
                                       "lemmas"});
    if (in_obj.contains("patents")) c.patents_path = in_obj["patents"];
    if (in_obj.contains("format")) {
      const std::string f = in_obj["format"];
      if (f == "jsonl")
        c.format = corpus::FileFormat::jsonl;
      else if (f == "csv")
        c.format = corpus::FileFormat::csv;
      else
        throw InputError("input.format must be 'jsonl' or 'csv'");
    }
    if (in_obj.contains("stopwords")) c.stopwords_path = in_obj["stopwords"];
    if (in_obj.contains("lemmas")) c.lemmas_path = in_obj["lemmas"];
  }
  if (j.contains("analysis_start"))
    c.analysis_start = parse_date(j["analysis_start"].get<std::string>());
  if (j.contains("firm_fe_threshold")) {
    c.firm_fe_threshold = j["firm_fe_threshold"];
    if (c.firm_fe_threshold < 1)
      throw InputError("firm_fe_threshold must be positive");
  }
  if (j.contains("citation_window_years")) {
    c.citation_window_years = j["citation_window_years"];
    if (c.citation_window_years < 1)
      throw InputError("citation_window_years must be positive");
  }
  if (j.contains("pair_convention")) {
    const std::string p = j["pair_convention"];
    if (p == "ordered")
      c.convention = knowledge::PairConvention::ordered;
    else if (p == "unordered")
      c.convention = knowledge::PairConvention::unordered;
    else
      throw InputError("pair_convention must be 'ordered' or 'unordered'");
  }
  if (j.contains("exclude_self_novelty"))
    c.exclude_self_novelty = j["exclude_self_novelty"];
  if (j.contains("quantiles")) {
    const auto& q = j["quantiles"];
    check_known_keys(q, "quantiles", {"novelty", "citation"});
    if (q.contains("novelty"))
      c.novelty_quantiles = parse_quantile_list(q["novelty"], "quantiles.novelty");
    if (q.contains("citation"))
      c.citation_quantiles =
          parse_quantile_list(q["citation"], "quantiles.citation");
  }
  if (j.contains("regression")) {
    const auto& r = j["regression"];
    check_known_keys(r, "regression",
                     {"max_order", "fixed_order", "absorb_tol",
                      "absorb_max_sweeps"});
    if (r.contains("max_order")) c.regression_max_order = r["max_order"];
    if (r.contains("fixed_order")) c.regression_fixed_order = r["fixed_order"];
    if (r.contains("absorb_tol")) c.absorb_tol = r["absorb_tol"];
    if (r.contains("absorb_max_sweeps"))
      c.absorb_max_sweeps = r["absorb_max_sweeps"];
    if (c.regression_max_order < 1 || c.regression_max_order > 8)
      throw InputError("regression.max_order must lie in [1, 8]");
    if (c.regression_fixed_order < 0 || c.regression_fixed_order > 8)
      throw InputError("regression.fixed_order must lie in [0, 8]");
    if (!(c.absorb_tol > 0.0))
      throw InputError("regression.absorb_tol must be positive");
    if (c.absorb_max_sweeps < 1)
      throw InputError("regression.absorb_max_sweeps must be positive");
  }
  if (j.contains("curve_points")) {
    c.curve_points = j["curve_points"];
    if (c.curve_points < 1) throw InputError("curve_points must be positive");
  }
  if (j.contains("histogram_bins")) {
    c.histogram_bins = j["histogram_bins"];
    if (c.histogram_bins < 1) throw InputError("histogram_bins must be positive");
  }
  if (j.contains("sim")) {
    const auto& s = j["sim"];
    check_known_keys(s, "sim",
                     {"categories", "agents_per_category", "knowledge_size",
                      "pareto_scale", "pareto_shape", "v0", "c0",
                      "value_coefficients"});
    if (s.contains("categories")) c.sim.categories = s["categories"];
    if (s.contains("agents_per_category"))
      c.sim.agents_per_category = s["agents_per_category"];
    if (s.contains("knowledge_size")) {
      c.sim.knowledge_size = s["knowledge_size"];
      if (!s.contains("pareto_scale"))
        c.sim.pareto_scale = static_cast<double>(c.sim.knowledge_size) + 1.0;
    }
    if (s.contains("pareto_scale")) c.sim.pareto_scale = s["pareto_scale"];
    if (s.contains("pareto_shape")) c.sim.pareto_shape = s["pareto_shape"];
    if (s.contains("v0")) c.sim.v0 = s["v0"];
    if (s.contains("c0")) c.sim.c0 = s["c0"];
    if (s.contains("value_coefficients")) {
      const auto& vc = s["value_coefficients"];
      if (!vc.is_array() || vc.size() != 4)
        throw InputError("sim.value_coefficients must be an array of 4 numbers");
      for (int k = 0; k < 4; ++k) c.sim.value_coefficients[k] = vc[k];
    }
    try {
      sim::validate(c.sim);
    } catch (const std::exception& e) {
      throw InputError(std::string("sim config: ") + e.what());
    }
  }
  if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("output_dir")) c.output_dir = j["output_dir"];
  if (j.contains("threads")) {
    c.threads = j["threads"];
    if (c.threads < 1) throw InputError("threads must be positive");
  }

  c.sim.seed = c.seed;
  c.sim.threads = c.threads;
  return c;
}

ordered_json config_tree(const PipelineConfig& c) {
  ordered_json j;
  j["input"]["patents"] = c.patents_path;
  j["input"]["format"] =
      c.format == corpus::FileFormat::jsonl ? "jsonl" : "csv";
  j["input"]["stopwords"] = c.stopwords_path;
  j["input"]["lemmas"] = c.lemmas_path;
  j["analysis_start"] = format_date(c.analysis_start);
  j["firm_fe_threshold"] = c.firm_fe_threshold;
  j["citation_window_years"] = c.citation_window_years;
  j["pair_convention"] =
      c.convention == knowledge::PairConvention::ordered ? "ordered"
                                                         : "unordered";
  j["exclude_self_novelty"] = c.exclude_self_novelty;
  j["quantiles"]["novelty"] = c.novelty_quantiles;
  j["quantiles"]["citation"] = c.citation_quantiles;
  j["regression"]["max_order"] = c.regression_max_order;
  j["regression"]["fixed_order"] = c.regression_fixed_order;
  j["regression"]["absorb_tol"] = c.absorb_tol;
  j["regression"]["absorb_max_sweeps"] = c.absorb_max_sweeps;
  j["curve_points"] = c.curve_points;
  j["histogram_bins"] = c.histogram_bins;
  j["sim"]["categories"] = c.sim.categories;
  j["sim"]["agents_per_category"] = c.sim.agents_per_category;
  j["sim"]["knowledge_size"] = c.sim.knowledge_size;
  j["sim"]["pareto_scale"] = c.sim.pareto_scale;
  j["sim"]["pareto_shape"] = c.sim.pareto_shape;
  j["sim"]["v0"] = c.sim.v0;
  j["sim"]["c0"] = c.sim.c0;
  j["sim"]["value_coefficients"] = c.sim.value_coefficients;
  j["seed"] = c.seed;
  j["output_dir"] = c.output_dir;
  j["threads"] = c.threads;
  return j;
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex16(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

}  // namespace

std::string config_to_json(const PipelineConfig& config, bool pretty) {
  return config_tree(config).dump(pretty ? 2 : -1) + (pretty ? "\n" : "");
}

std::string config_hash(const PipelineConfig& config) {
  ordered_json j = config_tree(config);
  // The hash identifies the analysis, not the run: worker count must not
  // change any artifact bytes, and where artifacts land is not part of
  // what they contain.
  j.erase("threads");
  j.erase("output_dir");
  return hex16(fnv1a(j.dump()));
}

namespace artifact {
std::string fit(Outcome outcome) {
  return outcome == Outcome::novelty ? "fit.json" : "fit_citations.json";
}
std::string expectation_curve(Outcome outcome) {
  return outcome == Outcome::novelty ? "curve_expectation.csv"
                                     : "curve_expectation_citations.csv";
}
std::string quantile_curves(Outcome outcome) {
  return outcome == Outcome::novelty ? "curve_quantiles.csv"
                                     : "curve_quantiles_citations.csv";
}
}  // namespace artifact

std::string artifact_path(const PipelineConfig& config,
                          const std::string& name) {
  return (fs::path(config.output_dir) / name).string();
}

namespace {

void require_artifact(const PipelineConfig& config, const std::string& name,
                      const std::string& stage) {
  if (!fs::exists(artifact_path(config, name)))
    throw InputError(name + " not found in " + config.output_dir +
                     "; run the " + stage + " stage first");
}

std::ofstream open_csv(const PipelineConfig& config, const std::string& name) {
  fs::create_directories(config.output_dir);
  const std::string path = artifact_path(config, name);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << "# recomb v1 config " << config_hash(config) << "\n";
  return out;
}

std::string fmt(double v) { return format_double(v); }

std::vector<double> curve_grid(int points) {
  std::vector<double> grid;
  grid.reserve(points);
  for (int k = 1; k <= points; ++k)
    grid.push_back(0.5 * static_cast<double>(k) / static_cast<double>(points));
  return grid;
}

corpus::StandardizationConfig standardization_of(const PipelineConfig& c) {
  corpus::StandardizationConfig std_config;
  if (!c.stopwords_path.empty())
    std_config.stopwords = corpus::load_stopwords(c.stopwords_path);
  if (!c.lemmas_path.empty())
    std_config.lemma_dictionary = corpus::load_lemma_tsv(c.lemmas_path);
  return std_config;
}

struct MetricsRow {
  std::string id;
  Date date;
  int year = 0;
  std::string firm;
  std::string ipc_class;
  long long inventors = 0;
  long long pair_count = 0;
  long long word_pairs = 0;
  double n_p = 0.0;
  double s_p = 0.0;
  double kbar = 0.0;
  double c_p = 0.0;
  bool flag_empty_pairs = false;
};

std::vector<MetricsRow> read_metrics(const std::string& path) {
  CsvReader reader(path);
  auto header = reader.next();
  if (!header) throw InputError(path + " is empty");
  std::unordered_map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header->size(); ++i) col[(*header)[i]] = i;
  for (const char* name :
       {"id", "date", "year", "firm", "ipc_class", "H_p", "M_p", "W_p", "n_p",
        "s_p", "Kbar_p", "c_p", "flag_empty_pairs"})
    if (!col.count(name))
      throw InputError(path + " lacks column '" + name + "'");

  std::vector<MetricsRow> rows;
  while (auto fields = reader.next()) {
    if (fields->size() != col.size())
      throw InputError(path + " line " + std::to_string(reader.line()) +
                       ": wrong field count");
    MetricsRow r;
    r.id = (*fields)[col["id"]];
    r.date = parse_date((*fields)[col["date"]]);
    r.year = static_cast<int>(parse_int_field((*fields)[col["year"]], "year"));
    r.firm = (*fields)[col["firm"]];
    r.ipc_class = (*fields)[col["ipc_class"]];
    r.inventors = parse_int_field((*fields)[col["H_p"]], "H_p");
    r.pair_count = parse_int_field((*fields)[col["M_p"]], "M_p");
    r.word_pairs = parse_int_field((*fields)[col["W_p"]], "W_p");
    r.n_p = parse_double_field((*fields)[col["n_p"]], "n_p");
    r.s_p = parse_double_field((*fields)[col["s_p"]], "s_p");
    r.kbar = parse_double_field((*fields)[col["Kbar_p"]], "Kbar_p");
    r.c_p = parse_double_field((*fields)[col["c_p"]], "c_p");
    r.flag_empty_pairs =
        parse_int_field((*fields)[col["flag_empty_pairs"]], "flag") != 0;
    rows.push_back(std::move(r));
  }
  return rows;
}

// Regression sample: collaborative patents with positive differentiation.
std::vector<econ::RegressionRow> regression_rows(
    const std::vector<MetricsRow>& metrics, Outcome outcome) {
  std::vector<econ::RegressionRow> rows;
  for (const auto& m : metrics) {
    if (!(m.s_p > 0.0) || m.inventors < 2) continue;
    econ::RegressionRow r;
    r.outcome = outcome == Outcome::novelty ? m.n_p : m.c_p;
    r.s = m.s_p;
    r.mean_knowledge = m.kbar;
    r.pair_count = static_cast<double>(m.pair_count);
    r.firm = m.firm;
    r.ipc_class = m.ipc_class;
    r.year = m.year;
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_histogram(std::ofstream& out, const std::vector<double>& values,
                     int bins) {
  std::vector<std::int64_t> count(bins, 0);
  for (double s : values) {
    if (!(s > 0.0) || s > 0.5) continue;
    const int idx = std::clamp(
        static_cast<int>(std::ceil(s * 2.0 * bins)) - 1, 0, bins - 1);
    ++count[idx];
  }
  write_csv_row(out, {"bin_lo", "bin_hi", "count"});
  for (int b = 0; b < bins; ++b) {
    const double lo = 0.5 * b / bins;
    const double hi = 0.5 * (b + 1) / bins;
    write_csv_row(out, {fmt(lo), fmt(hi), std::to_string(count[b])});
  }
}

// Copies data rows of an existing artifact under a fresh header comment.
void copy_rows(const PipelineConfig& config, const std::string& from,
               const std::string& to) {
  CsvReader reader(artifact_path(config, from));
  std::ofstream out = open_csv(config, to);
  while (auto fields = reader.next()) write_csv_row(out, *fields);
}

template <typename Fn>
void stage(const char* name, Fn&& fn) {
  try {
    fn();
  } catch (const InputError& e) {
    throw InputError(std::string(name) + ": " + e.what());
  } catch (const std::exception& e) {
    throw ComputeError(std::string(name) + ": " + e.what());
  }
}

}  // namespace

void run_ingest(const PipelineConfig& config) {
  std::vector<corpus::PatentRecord> records =
      corpus::parse_patent_file(config.patents_path, config.format);
  corpus::Corpus corpus = corpus::build_corpus(
      std::move(records), standardization_of(config), config.threads);
  fs::create_directories(config.output_dir);
  corpus::save_corpus(artifact_path(config, artifact::corpus), corpus);
}

void run_index(const PipelineConfig& config) {
  require_artifact(config, artifact::corpus, "ingest");
  corpus::Corpus corpus =
      corpus::load_corpus(artifact_path(config, artifact::corpus));
  std::vector<novelty::IndexInput> inputs = novelty::sorted_inputs(corpus);
  novelty::NoveltyIndex index =
      novelty::NoveltyIndex::build(inputs, corpus.pairs.size(), config.threads);
  novelty::save_index(artifact_path(config, artifact::index), index,
                      corpus.words, corpus.pairs, corpus.content_digest());

  std::ofstream out = open_csv(config, artifact::patent_novelty);
  write_csv_row(out, {"id", "date", "W_p", "novelty"});
  for (const auto& input : inputs) {
    if (input.pairs.empty()) continue;
    const auto report = index.patent_novelty(input.date, input.pairs,
                                             config.exclude_self_novelty);
    write_csv_row(out, {std::string(input.patent_id), format_date(input.date),
                        std::to_string(report.pair_count),
                        fmt(report.novelty)});
  }
}

void run_metrics(const PipelineConfig& config) {
  require_artifact(config, artifact::corpus, "ingest");
  require_artifact(config, artifact::index, "index");
  corpus::Corpus corpus =
      corpus::load_corpus(artifact_path(config, artifact::corpus));
  novelty::Snapshot snap =
      novelty::load_index(artifact_path(config, artifact::index));
  if (snap.corpus_digest != corpus.content_digest())
    throw InputError("novelty index was built from a different corpus; rerun "
                     "the index stage");

  knowledge::SweepOptions options;
  options.convention = config.convention;
  options.exclude_self_novelty = config.exclude_self_novelty;
  options.analysis_start = config.analysis_start;
  options.threads = config.threads;
  std::vector<knowledge::PatentMetrics> metrics =
      knowledge::run_sweep(corpus, snap.index, options);

  knowledge::CitationOptions cite_options;
  cite_options.window_years = config.citation_window_years;
  cite_options.convention = config.convention;
  std::vector<double> citations =
      knowledge::citation_metrics(corpus, cite_options);
  std::unordered_map<std::string_view, std::size_t> record_of;
  for (std::size_t i = 0; i < corpus.records.size(); ++i)
    record_of[std::string_view(corpus.records[i].patent_id)] = i;

  std::ofstream out = open_csv(config, artifact::metrics);
  write_csv_row(out, {"id", "date", "year", "firm", "ipc_class", "H_p", "M_p",
                      "W_p", "n_p", "s_p", "Kbar_p", "c_p",
                      "flag_empty_pairs"});
  for (const auto& m : metrics) {
    const double c_p = citations[record_of.at(std::string_view(m.patent_id))];
    write_csv_row(
        out, {m.patent_id, format_date(m.date), std::to_string(year_of(m.date)),
              m.firm_id, m.ipc_class, std::to_string(m.inventor_count),
              std::to_string(m.pair_count), std::to_string(m.word_pairs),
              fmt(m.pairwise_novelty), fmt(m.differentiation),
              fmt(m.mean_knowledge), fmt(c_p),
              m.has_empty_pair ? "1" : "0"});
  }
}

void run_regress(const PipelineConfig& config, Outcome outcome) {
  require_artifact(config, artifact::metrics, "metrics");
  std::vector<MetricsRow> metrics =
      read_metrics(artifact_path(config, artifact::metrics));
  std::vector<econ::RegressionRow> rows = regression_rows(metrics, outcome);

  econ::RegressionSpec spec;
  spec.max_order = config.regression_max_order;
  spec.fixed_order = config.regression_fixed_order;
  spec.firm_threshold = config.firm_fe_threshold;
  spec.absorb_tol = config.absorb_tol;
  spec.absorb_max_sweeps = config.absorb_max_sweeps;
  spec.threads = config.threads;
  econ::FitResult fit = econ::fit_regression(rows, spec);

  ordered_json out;
  out["version"] = 1;
  out["config_hash"] = config_hash(config);
  out["outcome"] = outcome == Outcome::novelty ? "novelty" : "citations";
  out["order"] = fit.order;
  out["n"] = fit.n;
  out["k"] = fit.k;
  out["rss"] = fit.rss;
  ordered_json coef, se;
  for (int p = 0; p < fit.order; ++p) {
    const std::string name = "s^" + std::to_string(p + 1);
    coef[name] = fit.beta[p];
    se[name] = std::sqrt(fit.covariance(p, p));
  }
  coef["kbar"] = fit.beta[fit.order];
  se["kbar"] = std::sqrt(fit.covariance(fit.order, fit.order));
  coef["pairs"] = fit.beta[fit.order + 1];
  se["pairs"] = std::sqrt(fit.covariance(fit.order + 1, fit.order + 1));
  out["coefficients"] = coef;
  out["clustered_se"] = se;
  ordered_json bic;
  const int first_order = spec.fixed_order > 0 ? spec.fixed_order : 1;
  for (std::size_t i = 0; i < fit.bic.size(); ++i)
    bic[std::to_string(first_order + static_cast<int>(i))] = fit.bic[i];
  out["bic"] = bic;
  out["cluster_count"] = fit.cluster_count;
  out["group_counts"] = {{"firm", fit.group_counts[0]},
                         {"ipc", fit.group_counts[1]},
                         {"year", fit.group_counts[2]}};
  out["absorption"] = {{"sweeps", fit.absorb.sweeps},
                       {"last_delta", fit.absorb.last_delta}};
  out["outcome_mean"] = fit.outcome_mean;
  out["power_means"] = fit.power_means;
  out["control_means"] = fit.control_means;
  out["conventions"] = {
      {"sample_filter", "s_p > 0 and H_p >= 2"},
      {"curve", "controls and absorbed effects at sample means"},
      {"quantile_estimator",
       "pinball IRLS with annealed smoothing, exact coordinate polish, "
       "effects as explicit indicators"}};

  fs::create_directories(config.output_dir);
  const std::string fit_path =
      artifact_path(config, artifact::fit(outcome));
  std::ofstream fit_out(fit_path, std::ios::binary);
  if (!fit_out) throw InputError("cannot write " + fit_path);
  fit_out << out.dump(2) << "\n";

  std::ofstream curve_out =
      open_csv(config, artifact::expectation_curve(outcome));
  write_csv_row(curve_out, {"s", "fit", "lo95", "hi95"});
  for (const auto& pt :
       econ::conditional_expectation_curve(fit, curve_grid(config.curve_points)))
    write_csv_row(curve_out,
                  {fmt(pt.s), fmt(pt.fit), fmt(pt.lo95), fmt(pt.hi95)});
}

void run_quantiles(const PipelineConfig& config, Outcome outcome) {
  require_artifact(config, artifact::metrics, "metrics");
  require_artifact(config, artifact::fit(outcome), "regress");
  std::ifstream fit_in(artifact_path(config, artifact::fit(outcome)));
  ordered_json fit_json;
  try {
    fit_json = ordered_json::parse(fit_in);
  } catch (const std::exception& e) {
    throw InputError(artifact::fit(outcome) + std::string(": ") + e.what());
  }
  const int order = fit_json.at("order");

  std::vector<MetricsRow> metrics =
      read_metrics(artifact_path(config, artifact::metrics));
  std::vector<econ::RegressionRow> rows = regression_rows(metrics, outcome);
  econ::DummyDesign design =
      econ::build_dummy_design(rows, order, config.firm_fe_threshold);
  const std::vector<double>& taus = outcome == Outcome::novelty
                                        ? config.novelty_quantiles
                                        : config.citation_quantiles;
  std::vector<econ::QuantileFit> fits =
      econ::fit_quantile_set(design, taus, config.threads);

  std::ofstream out = open_csv(config, artifact::quantile_curves(outcome));
  std::string degenerate;
  for (const auto& f : fits)
    if (f.degenerate) degenerate += (degenerate.empty() ? "" : " ") + fmt(f.tau);
  if (!degenerate.empty())
    out << "# degenerate quantiles (outcome mass at its minimum): "
        << degenerate << "\n";
  write_csv_row(out, {"tau", "s", "fit"});
  const std::vector<double> grid = curve_grid(config.curve_points);
  for (std::size_t i = 0; i < fits.size(); ++i)
    for (double s : grid)
      write_csv_row(out, {fmt(taus[i]), fmt(s),
                          fmt(econ::evaluate_at_means(design, fits[i].beta, s))});
}

void run_simulate(const PipelineConfig& config) {
  sim::SimResult result = sim::run_simulation(config.sim);

  std::ofstream out = open_csv(config, artifact::matches);
  write_csv_row(out, {"category", "i", "j", "s", "gross", "cost", "A",
                      "active"});
  for (const auto& r : result.records)
    write_csv_row(out, {std::to_string(r.category), std::to_string(r.i),
                        std::to_string(r.j), fmt(r.s), fmt(r.gross),
                        fmt(r.cost), fmt(r.net), r.active ? "1" : "0"});

  const sim::SimSummary& s = result.summary;
  std::ofstream sum = open_csv(config, artifact::sim_summary);
  write_csv_row(sum, {"categories", "agents", "matches", "active_matches",
                      "mean_pool", "mean_matched_s", "mean_active_s",
                      "min_matched_s", "max_matched_s"});
  write_csv_row(sum, {std::to_string(s.categories), std::to_string(s.agents),
                      std::to_string(s.matches),
                      std::to_string(s.active_matches), fmt(s.mean_pool),
                      fmt(s.mean_matched_s), fmt(s.mean_active_s),
                      fmt(s.min_matched_s), fmt(s.max_matched_s)});
}

void run_export(const PipelineConfig& config, Figure which) {
  if (which == Figure::fig1 || which == Figure::fig2) {
    const Outcome outcome =
        which == Figure::fig1 ? Outcome::novelty : Outcome::citations;
    const char* name = which == Figure::fig1 ? "fig1" : "fig2";
    require_artifact(config, artifact::expectation_curve(outcome), "regress");
    require_artifact(config, artifact::quantile_curves(outcome), "quantiles");
    copy_rows(config, artifact::expectation_curve(outcome),
              std::string(name) + "_expectation.csv");
    copy_rows(config, artifact::quantile_curves(outcome),
              std::string(name) + "_quantiles.csv");
    if (which == Figure::fig1) {
      require_artifact(config, artifact::metrics, "metrics");
      std::vector<MetricsRow> metrics =
          read_metrics(artifact_path(config, artifact::metrics));
      std::vector<double> s_values;
      for (const auto& m : metrics) s_values.push_back(m.s_p);
      std::ofstream out = open_csv(config, "fig1_histogram.csv");
      write_histogram(out, s_values, config.histogram_bins);
    }
    return;
  }

  require_artifact(config, artifact::matches, "simulate");
  CsvReader reader(artifact_path(config, artifact::matches));
  auto header = reader.next();
  if (!header) throw InputError("matches.csv is empty");
  std::vector<double> matched_s;
  std::vector<double> active_s, active_gross;
  while (auto fields = reader.next()) {
    const double s = parse_double_field((*fields)[3], "s");
    const double gross = parse_double_field((*fields)[4], "gross");
    const bool active = (*fields)[7] == "1";
    matched_s.push_back(s);
    if (active) {
      active_s.push_back(s);
      active_gross.push_back(gross);
    }
  }

  std::ofstream hist = open_csv(config, "fig3_matched_s.csv");
  write_histogram(hist, matched_s, config.histogram_bins);

  // Value quantile curves over active matches: quartic in s, no effects.
  const int order = 4;
  const auto n = static_cast<Eigen::Index>(active_gross.size());
  if (n <= order + 1)
    throw ComputeError("too few active matches for value quantile curves");
  Eigen::VectorXd y(n);
  Eigen::MatrixXd x(n, order + 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    y[i] = active_gross[i];
    x(i, 0) = 1.0;
    double v = 1.0;
    for (int k = 1; k <= order; ++k) {
      v *= active_s[i];
      x(i, k) = v;
    }
  }
  std::ofstream out = open_csv(config, "fig3_value_quantiles.csv");
  write_csv_row(out, {"tau", "s", "fit"});
  const std::vector<double> grid = curve_grid(config.curve_points);
  for (double tau : config.novelty_quantiles) {
    econ::QuantileFit fit = econ::fit_quantile(y, x, tau);
    for (double s : grid) {
      double value = fit.beta[0];
      double v = 1.0;
      for (int k = 1; k <= order; ++k) {
        v *= s;
        value += fit.beta[k] * v;
      }
      write_csv_row(out, {fmt(tau), fmt(s), fmt(value)});
    }
  }
}

void run_all(const PipelineConfig& config) {
  stage("ingest", [&] { run_ingest(config); });
  stage("index", [&] { run_index(config); });
  stage("metrics", [&] { run_metrics(config); });
  stage("regress", [&] { run_regress(config, Outcome::novelty); });
  stage("quantiles", [&] { run_quantiles(config, Outcome::novelty); });
}

}  // namespace recomb::pipeline
