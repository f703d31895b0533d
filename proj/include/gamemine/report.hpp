#pragma once

// Report assembly. JSON output uses insertion-ordered objects and carries
// the full configuration next to the results, so a report identifies the
// exact run that produced it and equal runs serialize byte-identically.

#include <cstdio>
#include <string>
#include <vector>

#include "json.hpp"

#include "gamemine/evaluate.hpp"
#include "gamemine/version.hpp"

namespace gamemine {

using ordered_json = nlohmann::ordered_json;

inline ordered_json report_skeleton(std::string_view command) {
  ordered_json j;
  j["tool"] = std::string(kToolkitName);
  j["version"] = std::string(kToolkitVersion);
  j["command"] = std::string(command);
  return j;
}

inline ordered_json cv_to_json(const CvResult& cv) {
  ordered_json j;
  j["instances"] = cv.n_instances;
  j["folds"] = cv.n_folds;
  j["pooled_correct"] = cv.pooled_correct;
  j["pooled_tested"] = cv.pooled_tested;
  j["accuracy"] = cv.pooled_accuracy();
  j["all_folds_failed"] = cv.all_folds_failed;
  ordered_json folds = ordered_json::array();
  for (const FoldOutcome& f : cv.folds) {
    ordered_json fj;
    fj["begin"] = f.test.begin;
    fj["end"] = f.test.end;
    if (f.failed) {
      fj["failed"] = true;
      fj["error"] = f.error;
    } else {
      fj["failed"] = false;
      fj["correct"] = f.correct;
      fj["tested"] = f.tested;
    }
    folds.push_back(std::move(fj));
  }
  j["fold_results"] = std::move(folds);
  j["confusion"] = cv.confusion; // [actual][predicted]
  return j;
}

inline ordered_json ranking_to_json(const std::vector<RankingEntry>& ranked) {
  ordered_json arr = ordered_json::array();
  for (const RankingEntry& e : ranked) {
    ordered_json j;
    j["classifier"] = e.name;
    j["failed"] = e.failed;
    if (!e.failed) j["accuracy"] = e.accuracy;
    arr.push_back(std::move(j));
  }
  return arr;
}

inline std::string format_percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f%%", fraction * 100.0);
  return buf;
}

inline std::string render_ranking_table(const std::vector<RankingEntry>& ranked) {
  std::size_t width = 10;
  for (const RankingEntry& e : ranked) width = std::max(width, e.name.size());
  std::string out = "rank  ";
  out += "classifier";
  out.append(width - 10, ' ');
  out += "  accuracy\n";
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    char rank[16];
    std::snprintf(rank, sizeof rank, "%4zu", i + 1);
    out += rank;
    out += "  ";
    out += ranked[i].name;
    out.append(width - ranked[i].name.size(), ' ');
    out += "  ";
    out += ranked[i].failed ? "failed" : format_percent(ranked[i].accuracy);
    out += '\n';
  }
  return out;
}

} // namespace gamemine
