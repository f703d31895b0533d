// Command-line front end. Every subcommand is a pure function of its inputs,
// flags, and the one --seed knob; reports and generated files are therefore
// reproducible byte for byte across runs.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "gamemine/gamemine.hpp"

using namespace gamemine;

namespace {

// Flag combinations the option parser cannot reject on its own.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open input file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << text;
  out.flush();
  if (!out) throw std::runtime_error("failed writing output file: " + path);
}

// Payload goes to --out when given, else to stdout; the human-readable
// summary then moves to stderr so stdout stays machine-parseable.
void emit(const std::optional<std::string>& out_path, const std::string& payload,
          const std::string& summary) {
  if (out_path) {
    write_file(*out_path, payload);
    if (!summary.empty()) std::cout << summary;
  } else {
    std::cout << payload;
    if (!summary.empty()) std::cerr << summary;
  }
}

const std::vector<ClassifierId> kCanonicalOrder = {
    ClassifierId::zero_r,       ClassifierId::uniform_random,
    ClassifierId::one_r,        ClassifierId::decision_table,
    ClassifierId::smo,          ClassifierId::equilibrium_responder,
};

bool equilibrium_applicable(const Dataset& d) {
  bool responder = false;
  for (std::size_t a = 0; a < d.schema.size(); ++a)
    if (a != d.class_attribute && d.schema[a].kind == AttrKind::numeric &&
        d.schema[a].name == "responder_delta")
      responder = true;
  bool accept = false, reject = false;
  for (const std::string& v : d.class_attr().values) {
    if (v == "accept") accept = true;
    if (v == "reject") reject = true;
  }
  return responder && accept && reject;
}

std::vector<std::string> default_classifiers(const Dataset& d) {
  std::vector<std::string> names;
  for (ClassifierId id : kCanonicalOrder) {
    if (id == ClassifierId::equilibrium_responder && !equilibrium_applicable(d)) continue;
    names.emplace_back(classifier_id_name(id));
  }
  return names;
}

ClassifierSpec spec_for(const std::string& name, std::uint64_t cli_seed) {
  const std::optional<ClassifierId> id = classifier_id_from_name(name);
  if (!id) throw UsageError("unknown classifier '" + name + "'");
  ClassifierSpec spec;
  spec.id = *id;
  spec.seed = derive_subseed(cli_seed, name);
  spec.smo.seed = spec.seed;
  return spec;
}

// ---------------------------------------------------------------------------
// featurize

struct FeaturizeArgs {
  std::string input;
  std::string game;
  int window = 3;
  bool window_given = false;
  std::optional<std::string> out;
  bool json = false;
};

int cmd_featurize(const FeaturizeArgs& args) {
  const std::string text = slurp(args.input);
  std::istringstream in(text);
  Dataset d;
  if (args.game == "rps") {
    d = featurize_rps(parse_rps_log(in), WindowConfig{args.window});
  } else {
    if (args.window_given) throw UsageError("--window only applies to --game rps");
    d = featurize_ct(parse_ct_log(in));
  }

  std::string summary = std::to_string(d.instances.size()) + " instances\n";
  if (args.json) {
    ordered_json j = report_skeleton("featurize");
    ordered_json config;
    config["input"] = args.input;
    config["game"] = args.game;
    if (args.game == "rps") config["window"] = args.window;
    config["out"] = args.out ? ordered_json(*args.out) : ordered_json(nullptr);
    j["config"] = std::move(config);
    j["relation"] = d.relation;
    j["attributes"] = d.schema.size();
    j["instances"] = d.instances.size();
    summary = j.dump(2) + "\n";
  }
  emit(args.out, write_arff(d), summary);
  return 0;
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateArgs {
  std::string input;
  std::optional<std::string> game;
  std::vector<int> windows;
  std::size_t folds = 10;
  std::vector<std::string> classifiers;
  std::uint64_t seed = 0;
  std::optional<std::string> out;
  bool json = false;
};

struct RankedRun {
  std::optional<int> window;
  std::size_t instances = 0;
  std::vector<std::pair<std::string, CvResult>> per_classifier;
  std::vector<RankingEntry> ranked;
};

RankedRun rank_dataset(const Dataset& d, std::optional<int> window,
                       std::vector<std::string> names, std::size_t folds,
                       std::uint64_t seed) {
  if (names.empty()) names = default_classifiers(d);
  RankedRun run;
  run.window = window;
  run.instances = d.instances.size();
  std::vector<RankingEntry> entries;
  for (const std::string& name : names) {
    const CvResult cv = cross_validate(d, spec_for(name, seed), folds);
    entries.push_back({name, cv.pooled_accuracy(), cv.all_folds_failed});
    run.per_classifier.emplace_back(name, cv);
  }
  run.ranked = rank_hypothesis_spaces(std::move(entries));
  return run;
}

int cmd_evaluate(const EvaluateArgs& args) {
  const std::string text = slurp(args.input);

  std::vector<RankedRun> runs;
  if (args.game) {
    std::vector<int> windows = args.windows;
    if (*args.game == "rps") {
      if (windows.empty()) windows.push_back(3);
      const std::vector<Episode> episodes = [&] {
        std::istringstream in(text);
        return parse_rps_log(in);
      }();
      for (int w : windows)
        runs.push_back(rank_dataset(featurize_rps(episodes, WindowConfig{w}), w,
                                    args.classifiers, args.folds, args.seed));
    } else {
      if (!windows.empty()) throw UsageError("--window only applies to --game rps");
      std::istringstream in(text);
      runs.push_back(rank_dataset(featurize_ct(parse_ct_log(in)), std::nullopt,
                                  args.classifiers, args.folds, args.seed));
    }
  } else {
    if (!args.windows.empty())
      throw UsageError("--window requires --game rps; ARFF input is already featurized");
    runs.push_back(rank_dataset(read_arff(text), std::nullopt, args.classifiers, args.folds,
                                args.seed));
  }

  std::string report;
  if (args.json) {
    ordered_json j = report_skeleton("evaluate");
    ordered_json config;
    config["input"] = args.input;
    config["game"] = args.game ? ordered_json(*args.game) : ordered_json(nullptr);
    if (!runs.empty() && runs.front().window) {
      ordered_json ws = ordered_json::array();
      for (const RankedRun& run : runs) ws.push_back(*run.window);
      config["windows"] = std::move(ws);
    }
    config["folds"] = args.folds;
    config["seed"] = args.seed;
    {
      ordered_json names = ordered_json::array();
      for (const auto& [name, cv] : runs.front().per_classifier) names.push_back(name);
      config["classifiers"] = std::move(names);
    }
    j["config"] = std::move(config);
    ordered_json results = ordered_json::array();
    for (const RankedRun& run : runs) {
      ordered_json rj;
      if (run.window) rj["window"] = *run.window;
      rj["instances"] = run.instances;
      rj["ranking"] = ranking_to_json(run.ranked);
      ordered_json details;
      for (const auto& [name, cv] : run.per_classifier) details[name] = cv_to_json(cv);
      rj["classifiers"] = std::move(details);
      results.push_back(std::move(rj));
    }
    j["results"] = std::move(results);
    report = j.dump(2) + "\n";
  } else {
    for (const RankedRun& run : runs) {
      if (run.window) report += "window " + std::to_string(*run.window) + ": ";
      report += std::to_string(run.instances) + " instances\n";
      report += render_ranking_table(run.ranked);
      report += '\n';
    }
  }

  if (args.out) {
    write_file(*args.out, report);
  } else {
    std::cout << report;
  }

  for (const RankedRun& run : runs)
    if (std::all_of(run.ranked.begin(), run.ranked.end(),
                    [](const RankingEntry& e) { return e.failed; }))
      return 1;
  return 0;
}

// ---------------------------------------------------------------------------
// mine

struct MineArgs {
  std::string input;
  std::optional<std::string> game;
  int window = 3;
  bool window_given = false;
  std::uint64_t seed = 0;
  std::optional<std::string> out;
  bool json = false;
};

int cmd_mine(const MineArgs& args) {
  const std::string text = slurp(args.input);
  Dataset d;
  if (args.game) {
    std::istringstream in(text);
    if (*args.game == "rps") {
      d = featurize_rps(parse_rps_log(in), WindowConfig{args.window});
    } else {
      if (args.window_given) throw UsageError("--window only applies to --game rps");
      d = featurize_ct(parse_ct_log(in));
    }
  } else {
    if (args.window_given)
      throw UsageError("--window requires --game rps; ARFF input is already featurized");
    d = read_arff(text);
  }

  struct MinedRule {
    std::string name;
    TrainedModel model;
    std::string rule;
    double conformance;
  };
  std::vector<MinedRule> mined;
  for (const std::string name : {"one_r", "decision_table"}) {
    TrainedModel m = fit(d, spec_for(name, args.seed));
    const std::string rule = extract_rule_text(m);
    const double conf = rule_conformance(m, d);
    mined.push_back(MinedRule{name, std::move(m), rule, conf});
  }

  // persist the better-conforming rule model; ties keep the simpler space
  const MinedRule& best =
      mined[1].conformance > mined[0].conformance ? mined[1] : mined[0];
  if (args.out) write_file(*args.out, write_model(best.model));

  if (args.json) {
    ordered_json j = report_skeleton("mine");
    ordered_json config;
    config["input"] = args.input;
    config["game"] = args.game ? ordered_json(*args.game) : ordered_json(nullptr);
    if (args.game && *args.game == "rps") config["window"] = args.window;
    config["seed"] = args.seed;
    config["out"] = args.out ? ordered_json(*args.out) : ordered_json(nullptr);
    j["config"] = std::move(config);
    j["instances"] = d.instances.size();
    ordered_json rules = ordered_json::array();
    for (const MinedRule& r : mined) {
      ordered_json rj;
      rj["classifier"] = r.name;
      rj["rule"] = r.rule;
      rj["conformance"] = r.conformance;
      rules.push_back(std::move(rj));
    }
    j["rules"] = std::move(rules);
    j["model"] = args.out ? ordered_json(*args.out) : ordered_json(nullptr);
    j["model_classifier"] = best.name;
    std::cout << j.dump(2) << "\n";
  } else {
    for (const MinedRule& r : mined) {
      std::cout << r.name << ": " << r.rule << "\n";
      std::cout << r.name << " conformance: " << format_percent(r.conformance) << "\n";
    }
  }
  return 0;
}

// ---------------------------------------------------------------------------
// synth

struct SynthArgs {
  std::string game;
  std::size_t subjects = 0; // 0: per-game default
  std::size_t threads = 2;
  std::size_t turns = 30;
  std::size_t records = 371;
  double adherence = -1.0; // <0: per-game default
  int lag = 1;
  std::string source = "own";
  std::uint64_t seed = 0;
  std::optional<std::string> out;
  bool json = false;
};

int cmd_synth(const SynthArgs& args) {
  std::string csv;
  std::size_t rows = 0;
  ordered_json config;
  config["game"] = args.game;
  if (args.game == "rps") {
    RpsSynthParams p;
    p.n_subjects = args.subjects ? args.subjects : 10;
    p.n_threads = args.threads;
    p.n_turns = args.turns;
    p.rule.lag = args.lag;
    p.rule.source = args.source == "opp" ? RuleSource::opp_prev : RuleSource::own_prev;
    if (args.adherence >= 0.0) p.rule.adherence = args.adherence;
    p.seed = args.seed;
    const std::vector<Episode> episodes = synth_rps(p);
    for (const Episode& ep : episodes) rows += ep.turns.size();
    csv = write_rps_csv(episodes);
    config["subjects"] = p.n_subjects;
    config["threads"] = p.n_threads;
    config["turns"] = p.n_turns;
    config["adherence"] = p.rule.adherence;
    config["lag"] = p.rule.lag;
    config["source"] = args.source == "opp" ? "opp" : "own";
  } else {
    CtSynthParams p;
    p.n_subjects = args.subjects ? args.subjects : 25;
    p.n_records = args.records;
    if (args.adherence >= 0.0) p.rule.adherence = args.adherence;
    p.seed = args.seed;
    const std::vector<CtRecord> records = synth_ct(p);
    rows = records.size();
    csv = write_ct_csv(records);
    config["subjects"] = p.n_subjects;
    config["records"] = p.n_records;
    config["adherence"] = p.rule.adherence;
  }
  config["seed"] = args.seed;
  config["out"] = args.out ? ordered_json(*args.out) : ordered_json(nullptr);

  std::string summary = std::to_string(rows) + " rows\n";
  if (args.json) {
    ordered_json j = report_skeleton("synth");
    j["config"] = std::move(config);
    j["rows"] = rows;
    summary = j.dump(2) + "\n";
  }
  emit(args.out, csv, summary);
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"behavior mining toolkit for repeated-game play logs"};
  app.require_subcommand(1);

  FeaturizeArgs fe;
  CLI::App* featurize = app.add_subcommand(
      "featurize", "convert a play log to a tuple dataset in ARFF");
  featurize->add_option("input", fe.input, "play log CSV")->required();
  featurize->add_option("--game", fe.game, "log format: rps or ct")
      ->required()
      ->check(CLI::IsMember({"rps", "ct"}));
  featurize->add_option("--window", fe.window, "history window in turns (rps)")
      ->check(CLI::PositiveNumber);
  featurize->add_option("--out", fe.out, "write the ARFF here instead of stdout");
  featurize->add_flag("--json", fe.json, "emit a JSON summary");

  EvaluateArgs ev;
  CLI::App* evaluate = app.add_subcommand(
      "evaluate", "rank classifiers by order-preserving cross-validation");
  evaluate->add_option("input", ev.input, "ARFF dataset, or a play log CSV with --game")
      ->required();
  evaluate->add_option("--game", ev.game, "treat input as a play log: rps or ct")
      ->check(CLI::IsMember({"rps", "ct"}));
  evaluate->add_option("--window", ev.windows, "history windows to sweep (rps)")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  evaluate->add_option("--folds", ev.folds, "cross-validation folds")
      ->check(CLI::Range(std::size_t{2}, std::size_t{1000000}));
  evaluate->add_option("--classifiers", ev.classifiers, "comma-separated classifier list")
      ->delimiter(',');
  evaluate->add_option("--seed", ev.seed, "master seed for seeded classifiers");
  evaluate->add_option("--out", ev.out, "write the report here instead of stdout");
  evaluate->add_flag("--json", ev.json, "emit the report as JSON");

  MineArgs mi;
  CLI::App* mine = app.add_subcommand("mine", "fit rule models and print their rules");
  mine->add_option("input", mi.input, "ARFF dataset, or a play log CSV with --game")
      ->required();
  mine->add_option("--game", mi.game, "treat input as a play log: rps or ct")
      ->check(CLI::IsMember({"rps", "ct"}));
  mine->add_option("--window", mi.window, "history window in turns (rps)")
      ->check(CLI::PositiveNumber);
  mine->add_option("--seed", mi.seed, "master seed for seeded classifiers");
  mine->add_option("--out", mi.out, "persist the best rule model here");
  mine->add_flag("--json", mi.json, "emit rules as JSON");

  SynthArgs sy;
  CLI::App* synth = app.add_subcommand("synth", "generate rule-following play logs");
  synth->add_option("--game", sy.game, "log format to generate: rps or ct")
      ->required()
      ->check(CLI::IsMember({"rps", "ct"}));
  synth->add_option("--subjects", sy.subjects, "number of subjects");
  synth->add_option("--threads", sy.threads, "episodes per subject (rps)");
  synth->add_option("--turns", sy.turns, "turns per episode (rps)");
  synth->add_option("--records", sy.records, "total records (ct)");
  synth->add_option("--adherence", sy.adherence, "probability of following the rule");
  synth->add_option("--lag", sy.lag, "reaction lag in turns (rps)")->check(CLI::PositiveNumber);
  synth->add_option("--source", sy.source, "react to own or opp history (rps)")
      ->check(CLI::IsMember({"own", "opp"}));
  synth->add_option("--seed", sy.seed, "master seed");
  synth->add_option("--out", sy.out, "write the CSV here instead of stdout");
  synth->add_flag("--json", sy.json, "emit a JSON summary");

  bool version_json = false;
  CLI::App* version = app.add_subcommand("version", "print the toolkit version");
  version->add_flag("--json", version_json, "emit as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (featurize->parsed()) {
      fe.window_given = featurize->count("--window") > 0;
      return cmd_featurize(fe);
    }
    if (evaluate->parsed()) return cmd_evaluate(ev);
    if (mine->parsed()) {
      mi.window_given = mine->count("--window") > 0;
      return cmd_mine(mi);
    }
    if (synth->parsed()) return cmd_synth(sy);
    if (version->parsed()) {
      if (version_json) {
        std::cout << report_skeleton("version").dump(2) << "\n";
      } else {
        std::cout << kToolkitName << " " << kToolkitVersion << "\n";
      }
      return 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
