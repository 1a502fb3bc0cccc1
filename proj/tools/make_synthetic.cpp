// Generates the bundled synthetic corpus: patents.jsonl plus the stopword
// and lemma files it needs, and a ready-to-run pipeline config. Output is
// deterministic for a fixed seed, so the committed fixtures are reproducible.
#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "recomb/dates.hpp"
#include "recomb/rng.hpp"

namespace {

using recomb::Date;
using recomb::rng::Stream;

struct Topic {
  const char* ipc;
  std::vector<const char*> nouns;
  std::vector<const char*> verbs;
};

const std::vector<Topic> kTopics = {
    {"G03F",
     {"wafer", "transistor", "lithography", "silicon", "dopant", "oxide",
      "substrate", "photoresist", "junction"},
     {"etch", "anneal", "deposit"}},
    {"C08L",
     {"polymer", "resin", "monomer", "viscosity", "elastomer", "copolymer",
      "filler", "extrusion", "adhesion"},
     {"cure", "blend", "crosslink"}},
    {"G02B",
     {"laser", "lens", "photon", "waveguide", "refraction", "prism", "mirror",
      "aperture", "grating"},
     {"diffract", "filter", "focus"}},
    {"A61K",
     {"compound", "inhibitor", "receptor", "dosage", "tablet", "formulation",
      "enzyme", "antibody", "metabolite"},
     {"administer", "dissolve", "bind"}},
    {"H04N",
     {"sensor", "pixel", "shutter", "exposure", "image", "contrast",
      "calibration", "distortion", "resolution"},
     {"detect", "scan", "calibrate"}},
    {"H04L",
     {"packet", "protocol", "router", "bandwidth", "latency", "queue",
      "antenna", "spectrum", "handshake"},
     {"transmit", "encrypt", "modulate"}},
    {"H01M",
     {"electrode", "cathode", "anode", "electrolyte", "separator", "capacity",
      "cell", "membrane", "lithium"},
     {"charge", "discharge", "cycle"}},
    {"F16C",
     {"bearing", "actuator", "piston", "valve", "torque", "gear", "damper",
      "flange", "spindle"},
     {"rotate", "couple", "lubricate"}},
    {"G06F",
     {"algorithm", "database", "query", "cache", "thread", "parser",
      "schedule", "memory", "partition"},
     {"compile", "index", "execute"}},
    {"C22C",
     {"alloy", "ceramic", "coating", "corrosion", "hardness", "grain",
      "composite", "fatigue", "fracture"},
     {"sinter", "weld", "harden"}},
};

const std::vector<const char*> kCompounds = {
    "self-assembly", "thin-film",  "cross-section",
    "multi-layer",   "solid-state", "real-time"};

const std::vector<const char*> kStopwords = {
    "a",    "an",     "and",   "are",     "as",    "at",      "be",
    "but",  "by",     "for",   "from",    "has",   "have",    "in",
    "into", "is",     "it",    "its",     "of",    "on",      "or",
    "that", "the",    "their", "this",    "to",    "was",     "were",
    "will", "with",   "which", "we",      "our",   "between", "during",
    "each", "also",   "more",  "than",    "may",   "can",     "such",
    "using", "based", "under", "over",    "after", "before",  "through"};

// Inflected surface forms whose default suffix strip would miss the lemma
// are collected here and written to lemmas.tsv.
std::map<std::string, std::string> g_lemmas;

bool ends_with(const std::string& w, const char* suffix) {
  const std::string s = suffix;
  return w.size() >= s.size() && w.compare(w.size() - s.size(), s.size(), s) == 0;
}

// Mirrors the analyzer's fallback: longest matching rule, identity guards,
// minimum stem length 3.
std::string rule_strip(const std::string& form) {
  struct Rule {
    const char* suffix;
    const char* replacement;
  };
  static const Rule rules[] = {{"sses", "ss"}, {"ies", "y"}, {"ing", ""},
                               {"ed", ""},     {"ss", "ss"}, {"us", "us"},
                               {"s", ""}};
  const Rule* best = nullptr;
  for (const Rule& r : rules) {
    if (!ends_with(form, r.suffix)) continue;
    if (best && std::string(best->suffix).size() >= std::string(r.suffix).size())
      continue;
    const std::string suffix = r.suffix;
    if (suffix != r.replacement && form.size() - suffix.size() < 3) continue;
    best = &r;
  }
  if (!best) return form;
  return form.substr(0, form.size() - std::string(best->suffix).size()) +
         best->replacement;
}

std::string inflect(const std::string& word, int variant) {
  std::string form;
  if (variant == 1) {  // plural / third person
    if (ends_with(word, "y") && word.size() > 1 &&
        std::string("aeiou").find(word[word.size() - 2]) == std::string::npos)
      form = word.substr(0, word.size() - 1) + "ies";
    else if (ends_with(word, "s") || ends_with(word, "x") ||
             ends_with(word, "ch") || ends_with(word, "sh"))
      form = word + "es";
    else
      form = word + "s";
  } else if (variant == 2) {  // progressive
    form = ends_with(word, "e") ? word.substr(0, word.size() - 1) + "ing"
                                : word + "ing";
  } else if (variant == 3) {  // past
    form = ends_with(word, "e") ? word + "d" : word + "ed";
  } else {
    return word;
  }
  // Hyphenated compounds inflect on the last segment only.
  std::string last = form;
  std::string head;
  if (auto pos = form.rfind('-'); pos != std::string::npos) {
    head = form.substr(0, pos + 1);
    last = form.substr(pos + 1);
  }
  if (rule_strip(last) != (head.empty() ? word : word.substr(head.size())))
    g_lemmas[last] = head.empty() ? word : word.substr(head.size());
  return form;
}

struct Record {
  std::string id;
  Date date;
  std::string abstract;
  std::vector<std::string> inventors;
  std::string firm;
  std::string ipc;
  std::vector<std::string> cites;
};

std::string make_abstract(Stream& r, int topic, bool degenerate) {
  if (degenerate) {
    static const char* duds[] = {"The 42 of 7% and 13.",
                                 "And the (3) x-9 was 2nd!",
                                 "In 1999 it was 50 or 60."};
    return duds[r.uniform_int(3)];
  }
  const int tokens = 12 + static_cast<int>(r.uniform_int(10));
  std::string out;
  int since_period = 0;
  bool sentence_start = true;
  for (int k = 0; k < tokens; ++k) {
    std::string w;
    const auto roll = r.uniform_int(100);
    if (roll < 26) {
      w = kStopwords[r.uniform_int(kStopwords.size())];
    } else if (roll < 31) {
      w = kCompounds[r.uniform_int(kCompounds.size())];
      if (r.uniform_int(4) == 0) w = inflect(w, 1);
    } else if (roll < 34) {
      static const char* numeric[] = {"42", "3nm", "12%", "x-9", "2nd"};
      w = numeric[r.uniform_int(5)];
    } else {
      // Mostly the home topic, sometimes a random one.
      const int t = r.uniform_int(100) < 85
                        ? topic
                        : static_cast<int>(r.uniform_int(kTopics.size()));
      const Topic& tp = kTopics[t];
      if (r.uniform_int(100) < 30) {
        const std::string verb = tp.verbs[r.uniform_int(tp.verbs.size())];
        w = inflect(verb, 1 + static_cast<int>(r.uniform_int(3)));
      } else {
        const std::string noun = tp.nouns[r.uniform_int(tp.nouns.size())];
        w = r.uniform_int(3) == 0 ? inflect(noun, 1) : noun;
      }
    }
    if (sentence_start && !w.empty()) {
      w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
      sentence_start = false;
    }
    if (!out.empty()) out += ' ';
    out += w;
    ++since_period;
    if (since_period >= 7 + static_cast<int>(r.uniform_int(5)) ||
        k + 1 == tokens) {
      out += '.';
      since_period = 0;
      sentence_start = true;
    } else if (r.uniform_int(12) == 0) {
      out += ',';
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string out_dir = argc > 1 ? argv[1] : "data/synthetic";
  std::filesystem::create_directories(out_dir);

  const std::uint64_t seed = 424242;
  const int patents = 500;
  const int firms = 30;

  Stream firm_stream(seed, 0, recomb::rng::Purpose::generic);

  // Zipf-ish firm sizes: two firms comfortably above the bundled config's
  // firm effect threshold, a long tail below it.
  std::vector<int> firm_of;
  for (int p = 0; p < patents; ++p) {
    double u = firm_stream.uniform_open01();
    double acc = 0.0, total = 0.0;
    for (int f = 0; f < firms; ++f) total += 1.0 / (1.0 + f);
    int chosen = firms - 1;
    for (int f = 0; f < firms; ++f) {
      acc += (1.0 / (1.0 + f)) / total;
      if (u <= acc) {
        chosen = f;
        break;
      }
    }
    firm_of.push_back(chosen);
  }

  std::vector<std::array<int, 2>> firm_topics(firms);
  for (int f = 0; f < firms; ++f) {
    firm_topics[f][0] = static_cast<int>(firm_stream.uniform_int(kTopics.size()));
    firm_topics[f][1] = static_cast<int>(firm_stream.uniform_int(kTopics.size()));
  }

  const Date from = recomb::make_date(1994, 1, 1);
  const Date to = recomb::make_date(2014, 12, 28);

  std::vector<Record> records(patents);
  for (int p = 0; p < patents; ++p) {
    Stream r(seed, static_cast<std::uint64_t>(p) + 1,
             recomb::rng::Purpose::generic);
    Record& rec = records[p];
    rec.id = "P" + std::to_string(1000 + p);
    rec.date = Date{from.days + static_cast<std::int32_t>(r.uniform_int(
                                    static_cast<std::uint64_t>(to.days) -
                                    static_cast<std::uint64_t>(from.days) + 1))};
    const int firm = firm_of[p];
    rec.firm = "F" + std::to_string(100 + firm);

    const int topic = r.uniform_int(100) < 80
                          ? firm_topics[firm][r.uniform_int(2)]
                          : static_cast<int>(r.uniform_int(kTopics.size()));
    static const char* subclasses[] = {"1/00", "3/02", "7/14", "17/30", "9/06"};
    rec.ipc = std::string(kTopics[topic].ipc) + subclasses[r.uniform_int(5)];

    // Small per-firm inventor pools make repeat collaboration common.
    const int pool = 10;
    const auto weights = std::array<int, 5>{15, 35, 25, 15, 10};
    int h = 1;
    {
      int roll = static_cast<int>(r.uniform_int(100)), acc = 0;
      for (int k = 0; k < 5; ++k) {
        acc += weights[k];
        if (roll < acc) {
          h = k + 1;
          break;
        }
      }
    }
    std::set<int> team;
    while (static_cast<int>(team.size()) < h)
      team.insert(static_cast<int>(r.uniform_int(pool)));
    for (int member : team)
      rec.inventors.push_back("inv_" + rec.firm + "_" +
                              std::to_string(member));

    const bool degenerate = p >= patents - 4;  // a few metric-free patents
    rec.abstract = make_abstract(r, topic, degenerate);
  }

  // Citations point at strictly earlier patents, mostly recent ones; some
  // same-firm picks produce inventor overlap for the self-citation rule.
  std::vector<int> by_date(patents);
  for (int p = 0; p < patents; ++p) by_date[p] = p;
  std::stable_sort(by_date.begin(), by_date.end(), [&](int a, int b) {
    return records[a].date < records[b].date;
  });
  std::vector<std::vector<int>> firm_earlier(firms);
  for (int rank = 0; rank < patents; ++rank) {
    const int p = by_date[rank];
    Stream r(seed, static_cast<std::uint64_t>(p) + 1,
             recomb::rng::Purpose::cost_noise);
    if (rank > 0) {
      const int cites = static_cast<int>(r.uniform_int(7));
      std::set<int> chosen;
      for (int c = 0; c < cites; ++c) {
        int target = -1;
        const auto& own = firm_earlier[firm_of[p]];
        if (!own.empty() && r.uniform_int(100) < 20) {
          target = own[own.size() - 1 -
                       r.uniform_int(std::min<std::size_t>(own.size(), 10))];
        } else {
          const int window = std::min(rank, 120);
          target = by_date[rank - 1 - static_cast<int>(r.uniform_int(window))];
        }
        chosen.insert(target);
      }
      for (int t : chosen) records[p].cites.push_back(records[t].id);
      std::sort(records[p].cites.begin(), records[p].cites.end());
    }
    firm_earlier[firm_of[p]].push_back(p);
  }

  // Emission order: scrambled, so nothing downstream can rely on file order.
  std::vector<int> order(patents);
  for (int p = 0; p < patents; ++p) order[p] = p;
  Stream shuffle(seed, 999, recomb::rng::Purpose::generic);
  for (int p = patents - 1; p > 0; --p)
    std::swap(order[p],
              order[shuffle.uniform_int(static_cast<std::uint64_t>(p) + 1)]);

  std::ofstream jsonl(out_dir + "/patents.jsonl", std::ios::binary);
  for (int idx : order) {
    const Record& rec = records[idx];
    nlohmann::ordered_json j;
    j["id"] = rec.id;
    j["date"] = recomb::format_date(rec.date);
    j["abstract"] = rec.abstract;
    j["inventors"] = rec.inventors;
    j["firm"] = rec.firm;
    j["ipc"] = rec.ipc;
    if (!rec.cites.empty()) j["cites"] = rec.cites;
    jsonl << j.dump() << "\n";
  }

  std::ofstream stopwords(out_dir + "/stopwords.txt", std::ios::binary);
  for (const char* w : kStopwords) stopwords << w << "\n";

  std::ofstream lemmas(out_dir + "/lemmas.tsv", std::ios::binary);
  for (const auto& [form, lemma] : g_lemmas)
    lemmas << form << "\t" << lemma << "\n";

  std::ofstream config(out_dir + "/config.json", std::ios::binary);
  config << R"({
  "input": {
    "patents": "data/synthetic/patents.jsonl",
    "format": "jsonl",
    "stopwords": "data/synthetic/stopwords.txt",
    "lemmas": "data/synthetic/lemmas.tsv"
  },
  "analysis_start": "2000-01-01",
  "firm_fe_threshold": 30,
  "output_dir": "out",
  "seed": 20240817
}
)";

  std::cout << "wrote " << patents << " records to " << out_dir
            << " (lemma entries: " << g_lemmas.size() << ")\n";
  return 0;
}
