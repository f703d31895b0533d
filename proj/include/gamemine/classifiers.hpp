#pragma once

// From-scratch supervised learners with a uniform fit/predict contract. Each
// classifier is one hypothesis space; a fitted model is one concrete
// hypothesis over the training schema. All tie-breaks (majority ties,
// attribute ties, vote ties) resolve by declaration/index order so that
// identical inputs always produce identical models and predictions.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "gamemine/gamedata.hpp"
#include "gamemine/rng.hpp"
#include "gamemine/smo.hpp"

namespace gamemine {

// ---------------------------------------------------------------------------
// Specs

enum class ClassifierId : std::uint8_t {
  zero_r = 0,
  uniform_random = 1,
  one_r = 2,
  decision_table = 3,
  smo = 4,
  equilibrium_responder = 5,
};

inline constexpr std::string_view classifier_id_name(ClassifierId id) {
  switch (id) {
    case ClassifierId::zero_r: return "zero_r";
    case ClassifierId::uniform_random: return "uniform_random";
    case ClassifierId::one_r: return "one_r";
    case ClassifierId::decision_table: return "decision_table";
    case ClassifierId::smo: return "smo";
    case ClassifierId::equilibrium_responder: return "equilibrium_responder";
  }
  return "?";
}

inline std::optional<ClassifierId> classifier_id_from_name(std::string_view name) {
  if (name == "zero_r") return ClassifierId::zero_r;
  if (name == "uniform_random") return ClassifierId::uniform_random;
  if (name == "one_r") return ClassifierId::one_r;
  if (name == "decision_table") return ClassifierId::decision_table;
  if (name == "smo") return ClassifierId::smo;
  if (name == "equilibrium_responder") return ClassifierId::equilibrium_responder;
  return std::nullopt;
}

struct OneRParams {
  int min_bucket = 6; // minimum majority-class occupancy per numeric bin
};

struct ClassifierSpec {
  ClassifierId id = ClassifierId::zero_r;
  std::uint64_t seed = 0; // uniform_random draw stream
  OneRParams one_r{};
  SmoParams smo{};
};

inline void validate_spec(const ClassifierSpec& spec) {
  switch (spec.id) {
    case ClassifierId::one_r:
      if (spec.one_r.min_bucket < 1)
        throw std::invalid_argument("one_r: min_bucket must be positive");
      break;
    case ClassifierId::smo: validate_smo_params(spec.smo); break;
    default: break;
  }
}

// ---------------------------------------------------------------------------
// Model states

struct ZeroRModel {
  std::size_t majority_class = 0;
};

// Copyable atomic position so a shared model can serve concurrent predicts,
// each consuming a distinct slot of the seed's stream.
class DrawCounter {
 public:
  DrawCounter() = default;
  DrawCounter(const DrawCounter& other) : value_(other.value_.load()) {}
  DrawCounter& operator=(const DrawCounter& other) {
    value_.store(other.value_.load());
    return *this;
  }
  std::uint64_t fetch_next() const { return value_.fetch_add(1); }
  std::uint64_t current() const { return value_.load(); }

 private:
  mutable std::atomic<std::uint64_t> value_{0};
};

struct UniformRandomModel {
  std::uint64_t seed = 0;
  std::size_t n_classes = 0;
  DrawCounter counter;
};

struct OneRModel {
  std::size_t attribute_index = 0;
  bool numeric = false;
  // nominal: class per declared attribute value, empty slot = unseen in training
  std::vector<std::optional<std::size_t>> value_map;
  // numeric: bin b covers (cuts[b-1], cuts[b]]; cuts are strictly increasing
  std::vector<Money> numeric_cuts;
  std::vector<std::size_t> bin_classes;
  std::size_t default_class = 0;
};

struct DecisionTableModel {
  std::vector<std::size_t> selected_attributes; // ascending schema indices
  std::map<std::vector<Cell>, std::size_t> table;
  std::size_t global_majority = 0;
};

// One-hot nominals, min-max numerics; training extrema frozen into the model.
struct FeatureEncoder {
  struct Extrema {
    Money lo;
    Money hi;
  };
  std::vector<std::optional<Extrema>> numeric_extrema; // per schema attribute

  friend bool operator==(const FeatureEncoder&, const FeatureEncoder&) = default;
};

inline FeatureEncoder build_encoder(const Dataset& d) {
  FeatureEncoder enc;
  enc.numeric_extrema.resize(d.schema.size());
  for (std::size_t a = 0; a < d.schema.size(); ++a) {
    if (a == d.class_attribute || d.schema[a].kind != AttrKind::numeric) continue;
    Money lo{0}, hi{0};
    bool first = true;
    for (const Instance& inst : d.instances) {
      Money v = inst[a].money();
      if (first || v < lo) lo = v;
      if (first || hi < v) hi = v;
      first = false;
    }
    enc.numeric_extrema[a] = FeatureEncoder::Extrema{lo, hi};
  }
  return enc;
}

inline std::vector<double> encode_features(const std::vector<Attribute>& schema,
                                           std::size_t class_attribute,
                                           const FeatureEncoder& enc, const Instance& inst) {
  std::vector<double> x;
  for (std::size_t a = 0; a < schema.size(); ++a) {
    if (a == class_attribute) continue;
    const Attribute& attr = schema[a];
    if (attr.kind == AttrKind::nominal) {
      for (std::size_t v = 0; v < attr.values.size(); ++v)
        x.push_back(inst[a].nominal_index() == v ? 1.0 : 0.0);
    } else {
      const auto& ex = enc.numeric_extrema[a];
      double span = ex ? static_cast<double>(ex->hi.cents - ex->lo.cents) : 0.0;
      x.push_back(span > 0.0
                      ? static_cast<double>(inst[a].money().cents - ex->lo.cents) / span
                      : 0.0);
    }
  }
  return x;
}

struct SmoPairModel {
  std::size_t neg_class = 0; // earlier-declared class of the pair, mapped to -1
  std::size_t pos_class = 0; // later-declared class, mapped to +1
  bool degenerate = false;   // training slice held a single class
  std::size_t constant_class = 0;
  FeatureEncoder encoder;
  std::vector<std::vector<double>> support_points; // encoded training vectors with alpha > 0
  std::vector<double> coefficients;                // alpha_i * y_i
  double bias = 0.0;
};

struct SmoModel {
  KernelSpec kernel{};
  std::vector<SmoPairModel> pairwise; // canonical order: (0,1), (0,2), ..., (k-2,k-1)
};

struct EquilibriumResponderModel {
  std::size_t responder_attribute = 0;
  std::size_t accept_class = 0;
  std::size_t reject_class = 0;
};

using ModelState = std::variant<ZeroRModel, UniformRandomModel, OneRModel, DecisionTableModel,
                                SmoModel, EquilibriumResponderModel>;

struct TrainedModel {
  ClassifierSpec spec;
  std::vector<Attribute> schema;
  std::size_t class_attribute = 0;
  ModelState state;
};

// ---------------------------------------------------------------------------
// Shared helpers

namespace detail {

inline std::vector<std::size_t> class_counts(const Dataset& d) {
  std::vector<std::size_t> counts(d.n_classes(), 0);
  for (const Instance& inst : d.instances) ++counts[d.class_index_of(inst)];
  return counts;
}

// Argmax with ties resolved toward the lowest index.
inline std::size_t argmax_index(const std::vector<std::size_t>& counts) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < counts.size(); ++i)
    if (counts[i] > counts[best]) best = i;
  return best;
}

inline void require_nonempty(const Dataset& d, const char* who) {
  if (d.instances.empty()) throw std::invalid_argument(std::string(who) + ": empty dataset");
}

} // namespace detail

// ---------------------------------------------------------------------------
// ZeroR

inline TrainedModel fit_zero_r(const Dataset& d, const ClassifierSpec& spec = {ClassifierId::zero_r}) {
  detail::require_nonempty(d, "zero_r");
  ZeroRModel m{detail::argmax_index(detail::class_counts(d))};
  return TrainedModel{spec, d.schema, d.class_attribute, m};
}

// ---------------------------------------------------------------------------
// Uniform random baseline (the mixed-strategy-equilibrium strategy)

inline TrainedModel fit_uniform_random(const Dataset& d, std::uint64_t seed) {
  validate_dataset(d);
  ClassifierSpec spec{ClassifierId::uniform_random};
  spec.seed = seed;
  return TrainedModel{spec, d.schema, d.class_attribute,
                      UniformRandomModel{seed, d.n_classes(), {}}};
}

// ---------------------------------------------------------------------------
// OneR

namespace detail {

struct OneRCandidate {
  OneRModel model;
  std::size_t errors = 0;
};

inline OneRCandidate one_r_nominal(const Dataset& d, std::size_t attr) {
  const std::size_t n_values = d.schema[attr].values.size();
  const std::size_t n_classes = d.n_classes();
  std::vector<std::vector<std::size_t>> counts(n_values, std::vector<std::size_t>(n_classes, 0));
  for (const Instance& inst : d.instances)
    ++counts[inst[attr].nominal_index()][d.class_index_of(inst)];

  OneRCandidate cand;
  cand.model.attribute_index = attr;
  cand.model.numeric = false;
  cand.model.value_map.resize(n_values);
  for (std::size_t v = 0; v < n_values; ++v) {
    std::size_t total = 0;
    for (std::size_t c : counts[v]) total += c;
    if (total == 0) continue; // unseen value: falls back to default_class
    std::size_t best = argmax_index(counts[v]);
    cand.model.value_map[v] = best;
    cand.errors += total - counts[v][best];
  }
  return cand;
}

struct OneRBin {
  Money lo;
  Money hi;
  std::vector<std::size_t> counts;

  std::size_t total() const {
    std::size_t t = 0;
    for (std::size_t c : counts) t += c;
    return t;
  }
  std::size_t majority() const { return argmax_index(counts); }
  std::size_t majority_count() const { return counts[majority()]; }
};

// Greedy discretization: sort by value, grow a bin until some class holds
// min_bucket instances in it, never cut between equal values, merge adjacent
// same-class bins. An undersized tail merges into its predecessor.
inline OneRCandidate one_r_numeric(const Dataset& d, std::size_t attr, int min_bucket) {
  const std::size_t n_classes = d.n_classes();
  std::vector<std::pair<Money, std::size_t>> sorted;
  sorted.reserve(d.instances.size());
  for (const Instance& inst : d.instances)
    sorted.emplace_back(inst[attr].money(), d.class_index_of(inst));
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  std::vector<OneRBin> bins;
  std::size_t i = 0;
  const std::size_t n = sorted.size();
  while (i < n) {
    OneRBin bin{sorted[i].first, sorted[i].first, std::vector<std::size_t>(n_classes, 0)};
    while (i < n && bin.majority_count() < static_cast<std::size_t>(min_bucket)) {
      bin.hi = sorted[i].first;
      ++bin.counts[sorted[i].second];
      ++i;
    }
    while (i < n && sorted[i].first == bin.hi) {
      ++bin.counts[sorted[i].second];
      ++i;
    }
    bins.push_back(std::move(bin));
  }
  if (bins.size() > 1 &&
      bins.back().majority_count() < static_cast<std::size_t>(min_bucket)) {
    OneRBin tail = std::move(bins.back());
    bins.pop_back();
    OneRBin& prev = bins.back();
    prev.hi = tail.hi;
    for (std::size_t c = 0; c < n_classes; ++c) prev.counts[c] += tail.counts[c];
  }
  // merge adjacent bins sharing a majority class
  std::vector<OneRBin> merged;
  for (OneRBin& bin : bins) {
    if (!merged.empty() && merged.back().majority() == bin.majority()) {
      merged.back().hi = bin.hi;
      for (std::size_t c = 0; c < n_classes; ++c) merged.back().counts[c] += bin.counts[c];
    } else {
      merged.push_back(std::move(bin));
    }
  }

  OneRCandidate cand;
  cand.model.attribute_index = attr;
  cand.model.numeric = true;
  for (std::size_t b = 0; b < merged.size(); ++b) {
    cand.model.bin_classes.push_back(merged[b].majority());
    cand.errors += merged[b].total() - merged[b].majority_count();
    if (b + 1 < merged.size()) {
      // midpoint in cents; upper-inclusive, so floor keeps training values
      // on their own side
      std::int64_t mid = merged[b].hi.cents +
                         (merged[b + 1].lo.cents - merged[b].hi.cents) / 2;
      cand.model.numeric_cuts.push_back(Money{mid});
    }
  }
  return cand;
}

} // namespace detail

inline TrainedModel fit_one_r(const Dataset& d, const OneRParams& params = {}) {
  detail::require_nonempty(d, "one_r");
  if (params.min_bucket < 1) throw std::invalid_argument("one_r: min_bucket must be positive");

  std::optional<detail::OneRCandidate> best;
  for (std::size_t a = 0; a < d.schema.size(); ++a) {
    if (a == d.class_attribute) continue;
    detail::OneRCandidate cand = d.schema[a].kind == AttrKind::nominal
                                     ? detail::one_r_nominal(d, a)
                                     : detail::one_r_numeric(d, a, params.min_bucket);
    if (!best || cand.errors < best->errors) best = std::move(cand);
  }
  if (!best) throw std::invalid_argument("one_r: dataset has no candidate attributes");
  best->model.default_class = detail::argmax_index(detail::class_counts(d));

  ClassifierSpec spec{ClassifierId::one_r};
  spec.one_r = params;
  return TrainedModel{spec, d.schema, d.class_attribute, best->model};
}

// ---------------------------------------------------------------------------
// Decision table

namespace detail {

inline std::vector<Cell> table_key(const Instance& inst, std::uint64_t mask) {
  std::vector<Cell> key;
  for (std::size_t a = 0; mask != 0; ++a, mask >>= 1)
    if (mask & 1) key.push_back(inst[a]);
  return key;
}

// Leave-one-out correct count for the table keyed on `mask`, computed from
// cell counts: each instance is scored against its cell minus itself, empty
// cells fall back to the self-removed global majority.
inline std::size_t loo_correct(const Dataset& d, std::uint64_t mask,
                               const std::vector<std::size_t>& global) {
  const std::size_t n_classes = d.n_classes();
  std::map<std::vector<Cell>, std::vector<std::size_t>> cells;
  for (const Instance& inst : d.instances) {
    auto [it, inserted] = cells.try_emplace(table_key(inst, mask));
    if (inserted) it->second.assign(n_classes, 0);
    ++it->second[d.class_index_of(inst)];
  }
  std::size_t correct = 0;
  for (const Instance& inst : d.instances) {
    const std::size_t y = d.class_index_of(inst);
    std::vector<std::size_t> counts = cells.at(table_key(inst, mask));
    --counts[y];
    std::size_t total = 0;
    for (std::size_t c : counts) total += c;
    std::size_t pred;
    if (total == 0) {
      std::vector<std::size_t> g = global;
      --g[y];
      pred = argmax_index(g);
    } else {
      pred = argmax_index(counts);
    }
    if (pred == y) ++correct;
  }
  return correct;
}

} // namespace detail

// Best-first search over attribute subsets maximizing leave-one-out accuracy,
// expanding by single-attribute addition or removal, stopping after 5
// consecutive expansions without improvement.
inline TrainedModel fit_decision_table(const Dataset& d) {
  detail::require_nonempty(d, "decision_table");
  if (d.schema.size() > 64)
    throw std::invalid_argument("decision_table: more than 64 attributes unsupported");

  const std::vector<std::size_t> global = detail::class_counts(d);

  struct Node {
    std::size_t correct;
    std::uint64_t order; // generation counter; earlier wins merit ties
    std::uint64_t mask;
    bool operator<(const Node& other) const {
      if (correct != other.correct) return correct > other.correct;
      return order < other.order;
    }
  };

  std::set<Node> open;
  std::set<std::uint64_t> visited;
  std::uint64_t generation = 0;

  std::size_t best_correct = detail::loo_correct(d, 0, global);
  std::uint64_t best_mask = 0;
  open.insert(Node{best_correct, generation++, 0});
  visited.insert(0);

  int stale = 0;
  while (!open.empty() && stale < 5) {
    Node node = *open.begin();
    open.erase(open.begin());
    bool improved = false;
    for (std::size_t a = 0; a < d.schema.size(); ++a) {
      if (a == d.class_attribute) continue;
      const std::uint64_t child = node.mask ^ (std::uint64_t{1} << a);
      if (!visited.insert(child).second) continue;
      const std::size_t correct = detail::loo_correct(d, child, global);
      open.insert(Node{correct, generation++, child});
      if (correct > best_correct) {
        best_correct = correct;
        best_mask = child;
        improved = true;
      }
    }
    if (improved)
      stale = 0;
    else
      ++stale;
  }

  DecisionTableModel m;
  for (std::size_t a = 0; a < d.schema.size(); ++a)
    if (best_mask & (std::uint64_t{1} << a)) m.selected_attributes.push_back(a);
  m.global_majority = detail::argmax_index(global);

  std::map<std::vector<Cell>, std::vector<std::size_t>> cells;
  for (const Instance& inst : d.instances) {
    auto [it, inserted] = cells.try_emplace(detail::table_key(inst, best_mask));
    if (inserted) it->second.assign(d.n_classes(), 0);
    ++it->second[d.class_index_of(inst)];
  }
  for (const auto& [key, counts] : cells) m.table[key] = detail::argmax_index(counts);

  return TrainedModel{ClassifierSpec{ClassifierId::decision_table}, d.schema, d.class_attribute,
                      m};
}

// ---------------------------------------------------------------------------
// SMO (binary and one-vs-one multiclass)

namespace detail {

inline SmoPairModel fit_smo_pair(const Dataset& d, std::size_t neg_class, std::size_t pos_class,
                                 const SmoParams& params) {
  SmoPairModel pair;
  pair.neg_class = neg_class;
  pair.pos_class = pos_class;
  pair.encoder = build_encoder(d);

  bool has_neg = false, has_pos = false;
  for (const Instance& inst : d.instances) {
    if (d.class_index_of(inst) == neg_class) has_neg = true;
    if (d.class_index_of(inst) == pos_class) has_pos = true;
  }
  if (!has_neg || !has_pos) {
    pair.degenerate = true;
    pair.constant_class = has_pos ? pos_class : neg_class;
    return pair;
  }

  SmoProblem prob;
  prob.points.reserve(d.instances.size());
  prob.labels.reserve(d.instances.size());
  for (const Instance& inst : d.instances) {
    prob.points.push_back(encode_features(d.schema, d.class_attribute, pair.encoder, inst));
    prob.labels.push_back(d.class_index_of(inst) == pos_class ? 1.0 : -1.0);
  }
  SmoSolution sol = solve_smo(prob, params);

  for (std::size_t i = 0; i < prob.points.size(); ++i) {
    if (sol.alpha[i] > 0.0) {
      pair.support_points.push_back(prob.points[i]);
      pair.coefficients.push_back(sol.alpha[i] * prob.labels[i]);
    }
  }
  pair.bias = sol.bias;
  return pair;
}

inline Dataset restrict_to_pair(const Dataset& d, std::size_t class_a, std::size_t class_b) {
  Dataset r;
  r.relation = d.relation;
  r.schema = d.schema;
  r.class_attribute = d.class_attribute;
  Attribute& cls = r.schema[r.class_attribute];
  cls.values = {d.class_attr().values[class_a], d.class_attr().values[class_b]};
  for (const Instance& inst : d.instances) {
    const std::size_t y = d.class_index_of(inst);
    if (y != class_a && y != class_b) continue;
    Instance copy = inst;
    copy[r.class_attribute] = Cell::nominal(y == class_a ? 0 : 1);
    r.instances.push_back(std::move(copy));
  }
  return r;
}

inline double pair_decision_value(const KernelSpec& kernel, const SmoPairModel& pair,
                                  const std::vector<double>& x) {
  double f = pair.bias;
  for (std::size_t i = 0; i < pair.support_points.size(); ++i)
    f += pair.coefficients[i] * kernel_eval(kernel, pair.support_points[i], x);
  return f;
}

} // namespace detail

// Binary soft-margin SVM trained by SMO. The earlier-declared class maps to
// -1, the later to +1. A single-class training set yields a constant
// classifier for that class.
inline TrainedModel fit_smo_binary(const Dataset& d, const SmoParams& params = {}) {
  validate_smo_params(params);
  detail::require_nonempty(d, "smo");
  if (d.n_classes() != 2)
    throw std::invalid_argument("smo: binary fit needs exactly two declared classes");

  SmoModel m;
  m.kernel = params.kernel;
  m.pairwise.push_back(detail::fit_smo_pair(d, 0, 1, params));

  ClassifierSpec spec{ClassifierId::smo};
  spec.smo = params;
  return TrainedModel{spec, d.schema, d.class_attribute, m};
}

// One-vs-one: a binary SMO per unordered class pair, trained on the
// restriction of the data to that pair; prediction by majority vote.
inline TrainedModel fit_smo_multiclass(const Dataset& d, const SmoParams& params = {}) {
  validate_smo_params(params);
  detail::require_nonempty(d, "smo");
  const std::size_t k = d.n_classes();
  if (k < 2) throw std::invalid_argument("smo: need at least two declared classes");

  SmoModel m;
  m.kernel = params.kernel;
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a + 1; b < k; ++b) {
      Dataset slice = detail::restrict_to_pair(d, a, b);
      SmoPairModel pair = detail::fit_smo_pair(slice, 0, 1, params);
      // map the slice-local classes back to the full declaration
      pair.neg_class = a;
      pair.pos_class = b;
      if (pair.degenerate) pair.constant_class = pair.constant_class == 1 ? b : a;
      m.pairwise.push_back(std::move(pair));
    }
  }

  ClassifierSpec spec{ClassifierId::smo};
  spec.smo = params;
  return TrainedModel{spec, d.schema, d.class_attribute, m};
}

// ---------------------------------------------------------------------------
// Equilibrium responder: accept exactly the proposals that increase the
// responder's payoff.

inline TrainedModel fit_equilibrium_responder(const Dataset& d) {
  validate_dataset(d);
  std::optional<std::size_t> responder;
  for (std::size_t a = 0; a < d.schema.size(); ++a)
    if (a != d.class_attribute && d.schema[a].kind == AttrKind::numeric &&
        d.schema[a].name == "responder_delta")
      responder = a;
  if (!responder)
    throw std::invalid_argument(
        "equilibrium_responder: schema has no numeric responder_delta attribute");

  const std::vector<std::string>& classes = d.class_attr().values;
  std::optional<std::size_t> accept, reject;
  for (std::size_t c = 0; c < classes.size(); ++c) {
    if (classes[c] == "accept") accept = c;
    if (classes[c] == "reject") reject = c;
  }
  if (!accept || !reject)
    throw std::invalid_argument("equilibrium_responder: class values must include accept/reject");

  return TrainedModel{ClassifierSpec{ClassifierId::equilibrium_responder}, d.schema,
                      d.class_attribute, EquilibriumResponderModel{*responder, *accept, *reject}};
}

// ---------------------------------------------------------------------------
// Prediction

namespace detail {

inline void check_instance(const TrainedModel& m, const Instance& inst) {
  if (inst.size() != m.schema.size())
    throw std::invalid_argument("predict: instance arity does not match model schema");
  for (std::size_t a = 0; a < m.schema.size(); ++a) {
    if (a == m.class_attribute) continue; // class cell ignored if present
    validate_cell(m.schema[a], inst[a]);
  }
}

inline std::size_t majority_vote(const std::vector<std::size_t>& votes) {
  return argmax_index(votes); // ties toward the earliest-declared class
}

} // namespace detail

inline std::size_t predict(const TrainedModel& m, const Instance& inst) {
  detail::check_instance(m, inst);
  return std::visit(
      [&](const auto& state) -> std::size_t {
        using T = std::decay_t<decltype(state)>;
        if constexpr (std::is_same_v<T, ZeroRModel>) {
          return state.majority_class;
        } else if constexpr (std::is_same_v<T, UniformRandomModel>) {
          SplitMix64 g(derive_subseed(state.seed, state.counter.fetch_next()));
          return static_cast<std::size_t>(g.next_below(state.n_classes));
        } else if constexpr (std::is_same_v<T, OneRModel>) {
          const Cell& cell = inst[state.attribute_index];
          if (state.numeric) {
            std::size_t bin = 0;
            while (bin < state.numeric_cuts.size() && state.numeric_cuts[bin] < cell.money())
              ++bin;
            return state.bin_classes[bin];
          }
          const auto& mapped = state.value_map[cell.nominal_index()];
          return mapped ? *mapped : state.default_class;
        } else if constexpr (std::is_same_v<T, DecisionTableModel>) {
          std::vector<Cell> key;
          for (std::size_t a : state.selected_attributes) key.push_back(inst[a]);
          auto it = state.table.find(key);
          return it != state.table.end() ? it->second : state.global_majority;
        } else if constexpr (std::is_same_v<T, SmoModel>) {
          std::vector<std::size_t> votes(m.schema[m.class_attribute].values.size(), 0);
          for (const SmoPairModel& pair : state.pairwise) {
            if (pair.degenerate) {
              ++votes[pair.constant_class];
              continue;
            }
            std::vector<double> x =
                encode_features(m.schema, m.class_attribute, pair.encoder, inst);
            double f = detail::pair_decision_value(state.kernel, pair, x);
            ++votes[f > 0.0 ? pair.pos_class : pair.neg_class];
          }
          return detail::majority_vote(votes);
        } else {
          static_assert(std::is_same_v<T, EquilibriumResponderModel>);
          return inst[state.responder_attribute].money() > Money{0} ? state.accept_class
                                                                    : state.reject_class;
        }
      },
      m.state);
}

// ---------------------------------------------------------------------------
// Fit dispatch

inline TrainedModel fit(const Dataset& d, const ClassifierSpec& spec) {
  validate_spec(spec);
  TrainedModel m = [&] {
    switch (spec.id) {
      case ClassifierId::zero_r: return fit_zero_r(d, spec);
      case ClassifierId::uniform_random: return fit_uniform_random(d, spec.seed);
      case ClassifierId::one_r: return fit_one_r(d, spec.one_r);
      case ClassifierId::decision_table: return fit_decision_table(d);
      case ClassifierId::smo:
        return d.n_classes() == 2 ? fit_smo_binary(d, spec.smo) : fit_smo_multiclass(d, spec.smo);
      case ClassifierId::equilibrium_responder: return fit_equilibrium_responder(d);
    }
    throw std::invalid_argument("unknown classifier id");
  }();
  m.spec = spec; // keep the caller's configuration verbatim for reporting
  return m;
}

// ---------------------------------------------------------------------------
// Rule rendering

namespace detail {

inline std::string join_clauses(const std::vector<std::string>& clauses) {
  std::string out;
  for (std::size_t i = 0; i < clauses.size(); ++i) {
    if (i > 0) out += "; ";
    out += clauses[i];
  }
  return out;
}

} // namespace detail

// Canonical deterministic rendering of OneR and decision-table models.
inline std::string extract_rule_text(const TrainedModel& m) {
  const Attribute& cls = m.schema[m.class_attribute];
  if (const auto* oner = std::get_if<OneRModel>(&m.state)) {
    const Attribute& attr = m.schema[oner->attribute_index];
    if (oner->numeric) {
      if (oner->bin_classes.size() == 1) return "ALWAYS " + cls.values[oner->bin_classes[0]];
      std::vector<std::string> clauses;
      for (std::size_t b = 0; b < oner->bin_classes.size(); ++b) {
        std::string cond;
        if (b == 0) {
          cond = attr.name + "<=" + to_string(oner->numeric_cuts[0]);
        } else if (b + 1 == oner->bin_classes.size()) {
          cond = attr.name + ">" + to_string(oner->numeric_cuts[b - 1]);
        } else {
          cond = to_string(oner->numeric_cuts[b - 1]) + "<" + attr.name +
                 "<=" + to_string(oner->numeric_cuts[b]);
        }
        clauses.push_back("IF " + cond + " THEN " + cls.name + "=" +
                          cls.values[oner->bin_classes[b]]);
      }
      return detail::join_clauses(clauses);
    }
    std::vector<std::string> clauses;
    for (std::size_t v = 0; v < oner->value_map.size(); ++v) {
      if (!oner->value_map[v]) continue;
      clauses.push_back("IF " + attr.name + "=" + attr.values[v] + " THEN " + cls.name + "=" +
                        cls.values[*oner->value_map[v]]);
    }
    if (clauses.empty()) return "ALWAYS " + cls.values[oner->default_class];
    return detail::join_clauses(clauses);
  }
  if (const auto* table = std::get_if<DecisionTableModel>(&m.state)) {
    if (table->selected_attributes.empty())
      return "ALWAYS " + cls.values[table->global_majority];
    std::vector<std::string> clauses;
    for (const auto& [key, klass] : table->table) {
      std::string cond;
      for (std::size_t i = 0; i < key.size(); ++i) {
        if (i > 0) cond += " AND ";
        const Attribute& attr = m.schema[table->selected_attributes[i]];
        cond += attr.name + "=" + cell_to_string(attr, key[i]);
      }
      clauses.push_back("IF " + cond + " THEN " + cls.name + "=" + cls.values[klass]);
    }
    clauses.push_back("ELSE " + cls.name + "=" + cls.values[table->global_majority]);
    return detail::join_clauses(clauses);
  }
  throw std::invalid_argument("extract_rule_text: model is not rule-based");
}

} // namespace gamemine
