#pragma once

// Order-preserving k-fold cross-validation and hypothesis-space ranking.
// Folds are contiguous index ranges, never shuffled, so temporally ordered
// play data keeps its order and results are exactly reproducible. Accuracy
// is pooled over folds (total correct / total tested); a fold whose fit or
// prediction throws is recorded as failed and excluded from the pool.

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gamemine/classifiers.hpp"
#include "gamemine/gamedata.hpp"

namespace gamemine {

struct FoldRange {
  std::size_t begin = 0;
  std::size_t end = 0; // half-open

  std::size_t size() const { return end - begin; }
  friend bool operator==(const FoldRange&, const FoldRange&) = default;
};

// Splits [0, n) into k contiguous ranges. The first n % k folds get the
// extra instance, so sizes never differ by more than one and larger folds
// come first.
inline std::vector<FoldRange> make_ordered_folds(std::size_t n, std::size_t k) {
  if (k < 2) throw std::invalid_argument("fold count must be at least 2");
  if (k > n) throw std::invalid_argument("fold count exceeds instance count");
  const std::size_t base = n / k;
  const std::size_t extra = n % k;
  std::vector<FoldRange> folds;
  folds.reserve(k);
  std::size_t at = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t len = base + (i < extra ? 1 : 0);
    folds.push_back(FoldRange{at, at + len});
    at += len;
  }
  return folds;
}

struct FoldOutcome {
  FoldRange test;
  bool failed = false;
  std::string error;
  std::size_t correct = 0;
  std::size_t tested = 0;
};

struct CvResult {
  std::size_t n_instances = 0;
  std::size_t n_folds = 0;
  std::vector<FoldOutcome> folds;
  std::vector<std::vector<std::size_t>> confusion; // [actual][predicted], non-failed folds
  std::size_t pooled_correct = 0;
  std::size_t pooled_tested = 0;
  bool all_folds_failed = false;

  double pooled_accuracy() const {
    return pooled_tested == 0 ? 0.0
                              : static_cast<double>(pooled_correct) /
                                    static_cast<double>(pooled_tested);
  }
};

// fit_fn(const Dataset& train) -> TrainedModel. Injectable so evaluation
// behavior under failing fits stays testable.
template <typename FitFn>
CvResult cross_validate_with(const Dataset& d, std::size_t k, FitFn&& fit_fn) {
  validate_dataset(d);
  const std::vector<FoldRange> plan = make_ordered_folds(d.instances.size(), k);

  CvResult result;
  result.n_instances = d.instances.size();
  result.n_folds = k;
  const std::size_t n_classes = d.n_classes();
  result.confusion.assign(n_classes, std::vector<std::size_t>(n_classes, 0));

  for (const FoldRange& test : plan) {
    FoldOutcome outcome;
    outcome.test = test;
    try {
      Dataset train;
      train.relation = d.relation;
      train.schema = d.schema;
      train.class_attribute = d.class_attribute;
      train.instances.reserve(d.instances.size() - test.size());
      for (std::size_t i = 0; i < d.instances.size(); ++i)
        if (i < test.begin || i >= test.end) train.instances.push_back(d.instances[i]);

      const TrainedModel model = fit_fn(train);
      std::vector<std::pair<std::size_t, std::size_t>> hits; // (actual, predicted)
      hits.reserve(test.size());
      for (std::size_t i = test.begin; i < test.end; ++i) {
        const std::size_t actual = d.class_index_of(d.instances[i]);
        const std::size_t predicted = predict(model, d.instances[i]);
        hits.emplace_back(actual, predicted);
      }
      for (const auto& [actual, predicted] : hits) {
        ++outcome.tested;
        if (actual == predicted) ++outcome.correct;
        ++result.confusion[actual][predicted];
      }
    } catch (const std::exception& e) {
      outcome.failed = true;
      outcome.error = e.what();
      outcome.correct = 0;
      outcome.tested = 0;
    }
    if (!outcome.failed) {
      result.pooled_correct += outcome.correct;
      result.pooled_tested += outcome.tested;
    }
    result.folds.push_back(std::move(outcome));
  }
  result.all_folds_failed =
      std::all_of(result.folds.begin(), result.folds.end(),
                  [](const FoldOutcome& f) { return f.failed; });
  return result;
}

inline CvResult cross_validate(const Dataset& d, const ClassifierSpec& spec, std::size_t k) {
  validate_spec(spec);
  return cross_validate_with(d, k, [&](const Dataset& train) { return fit(train, spec); });
}

// ---------------------------------------------------------------------------
// Ranking

struct RankingEntry {
  std::string name; // classifier id, unique within one ranking
  double accuracy = 0.0;
  bool failed = false; // evaluation produced no usable folds
};

// Highest accuracy first; failed entries sink to the bottom; ties break by
// name so rankings are total and reproducible.
inline std::vector<RankingEntry> rank_hypothesis_spaces(std::vector<RankingEntry> entries) {
  std::stable_sort(entries.begin(), entries.end(),
                   [](const RankingEntry& a, const RankingEntry& b) {
                     if (a.failed != b.failed) return !a.failed;
                     if (a.accuracy != b.accuracy) return a.accuracy > b.accuracy;
                     return a.name < b.name;
                   });
  return entries;
}

inline const RankingEntry& best_hypothesis_space(const std::vector<RankingEntry>& ranked) {
  for (const RankingEntry& e : ranked)
    if (!e.failed) return e;
  throw std::invalid_argument("every hypothesis space failed evaluation");
}

// ---------------------------------------------------------------------------
// Rule conformance: fraction of decisions a fitted model reproduces.

inline double rule_conformance(const TrainedModel& m, const Dataset& d) {
  validate_dataset(d);
  if (d.instances.empty()) throw std::invalid_argument("rule_conformance: empty dataset");
  if (m.schema != d.schema || m.class_attribute != d.class_attribute)
    throw std::invalid_argument("rule_conformance: model schema does not match dataset");
  std::size_t correct = 0;
  for (const Instance& inst : d.instances)
    if (predict(m, inst) == d.class_index_of(inst)) ++correct;
  return static_cast<double>(correct) / static_cast<double>(d.instances.size());
}

} // namespace gamemine
