#pragma once

// Synthetic rule-following players. Each generator draws from a known
// deterministic rule blurred by an adherence parameter, so the best possible
// prediction accuracy is known in closed form and miners can be checked
// against it. All randomness flows through per-unit derived subseeds: record
// and episode streams are independent of how many units precede them.

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gamemine/gamedata.hpp"
#include "gamemine/rng.hpp"

namespace gamemine {

// ---------------------------------------------------------------------------
// Repeated zero-sum hand-gesture play

enum class RuleSource : std::uint8_t { own_prev, opp_prev };

// "Play map[g] whenever the gesture `lag` turns back on `source`'s side was
// g." With probability 1 - adherence the player deviates uniformly to one of
// the two other gestures, so adherence equals the best achievable prediction
// accuracy.
struct RpsSubjectRule {
  RuleSource source = RuleSource::own_prev;
  int lag = 1;
  std::array<Gesture, 3> map{Gesture::paper, Gesture::scissors, Gesture::rock};
  double adherence = 1.0;
};

inline void validate_rule(const RpsSubjectRule& rule) {
  if (rule.lag < 1) throw std::invalid_argument("rule lag must be at least 1");
  if (!(rule.adherence >= 1.0 / 3.0 && rule.adherence <= 1.0))
    throw std::invalid_argument("rule adherence must lie in [1/3, 1]");
}

struct RpsSynthParams {
  std::size_t n_subjects = 10;
  std::size_t n_threads = 2; // episodes per subject
  std::size_t n_turns = 30;  // turns per episode
  RpsSubjectRule rule;
  std::optional<RpsSubjectRule> opponent_rule; // absent: uniform opponent
  std::uint64_t seed = 0;
};

namespace detail {

inline Gesture uniform_gesture(SplitMix64& g) {
  return kAllGestures[g.next_below(3)];
}

// Deviations go to the two other gestures with equal probability.
inline Gesture rule_gesture(const RpsSubjectRule& rule, Gesture source_gesture, SplitMix64& g) {
  const Gesture target = rule.map[static_cast<std::size_t>(source_gesture)];
  if (g.next_bernoulli(rule.adherence)) return target;
  const std::uint64_t other = g.next_below(2);
  std::size_t seen = 0;
  for (Gesture alt : kAllGestures) {
    if (alt == target) continue;
    if (seen == other) return alt;
    ++seen;
  }
  return target; // unreachable
}

} // namespace detail

// One episode per (subject, thread). Until a rule has `lag` turns of history
// it plays uniformly. Draw order within a turn: focal player, then opponent.
inline std::vector<Episode> synth_rps(const RpsSynthParams& params) {
  validate_rule(params.rule);
  if (params.opponent_rule) validate_rule(*params.opponent_rule);
  if (params.n_subjects == 0 || params.n_threads == 0 || params.n_turns == 0)
    throw std::invalid_argument("synth_rps: counts must be positive");

  std::vector<Episode> episodes;
  episodes.reserve(params.n_subjects * params.n_threads);
  std::size_t episode_index = 0;
  for (std::size_t s = 0; s < params.n_subjects; ++s) {
    for (std::size_t t = 0; t < params.n_threads; ++t, ++episode_index) {
      SplitMix64 g(derive_subseed(params.seed, episode_index));
      Episode ep;
      ep.subject_id = "s" + std::to_string(s + 1);
      ep.thread_id = "t" + std::to_string(t + 1);
      std::vector<Gesture> own, opp;
      for (std::size_t turn = 0; turn < params.n_turns; ++turn) {
        Gesture focal;
        const int lag = params.rule.lag;
        if (turn < static_cast<std::size_t>(lag)) {
          focal = detail::uniform_gesture(g);
        } else {
          const Gesture src = params.rule.source == RuleSource::own_prev ? own[turn - lag]
                                                                         : opp[turn - lag];
          focal = detail::rule_gesture(params.rule, src, g);
        }
        Gesture other;
        if (!params.opponent_rule) {
          other = detail::uniform_gesture(g);
        } else {
          // the opponent's own side is the focal player's opp column
          const int olag = params.opponent_rule->lag;
          if (turn < static_cast<std::size_t>(olag)) {
            other = detail::uniform_gesture(g);
          } else {
            const Gesture src = params.opponent_rule->source == RuleSource::own_prev
                                    ? opp[turn - olag]
                                    : own[turn - olag];
            other = detail::rule_gesture(*params.opponent_rule, src, g);
          }
        }
        own.push_back(focal);
        opp.push_back(other);
        ep.turns.push_back(RpsTurn{static_cast<int>(turn), focal, other});
      }
      episodes.push_back(std::move(ep));
    }
  }
  return episodes;
}

enum class RpsPredictorKind : std::uint8_t { generating_rule, uniform_baseline };

// Closed-form accuracy of a predictor against play generated by `rule`,
// evaluated on decisions where the rule has enough history.
inline double oracle_expected_accuracy(const RpsSubjectRule& rule, RpsPredictorKind kind) {
  validate_rule(rule);
  switch (kind) {
    case RpsPredictorKind::generating_rule: return rule.adherence;
    case RpsPredictorKind::uniform_baseline: return 1.0 / 3.0;
  }
  throw std::invalid_argument("unknown predictor kind");
}

// ---------------------------------------------------------------------------
// One-shot proposal responses

// Payoff-increase rule: accept any offer that raises the responder's payoff,
// and at zero responder change accept exactly when the proposer gains.
inline bool ct_refusal_reply(Money proposer_delta, Money responder_delta) {
  if (responder_delta > Money{0}) return true;
  if (responder_delta < Money{0}) return false;
  return proposer_delta > Money{0};
}

struct DeltaGridEntry {
  Money value;
  std::uint64_t weight;
};

struct DeltaGrid {
  std::vector<DeltaGridEntry> proposer;
  std::vector<DeltaGridEntry> responder;
};

inline void validate_grid(const DeltaGrid& grid) {
  for (const auto* side : {&grid.proposer, &grid.responder}) {
    if (side->empty()) throw std::invalid_argument("delta grid side is empty");
    std::uint64_t total = 0;
    for (const DeltaGridEntry& e : *side) {
      if (e.weight == 0) throw std::invalid_argument("delta grid weight must be positive");
      total += e.weight;
    }
    if (total == 0) throw std::invalid_argument("delta grid has zero total weight");
  }
}

// Weighted payoff-change values mimicking the texture of small-stakes
// proposal data: responder changes cluster hard on exactly 0.00 (weight
// 4640 of 10759, i.e. 160/371), with the rest spread over a 0.10-step
// lattice from -1.35 to +1.45; proposer changes are uniform on
// -0.40..+0.40.
inline DeltaGrid default_delta_grid() {
  DeltaGrid grid;
  for (int c = -40; c <= 40; c += 10) grid.proposer.push_back({Money{c}, 1});
  grid.responder.push_back({Money{0}, 4640});
  for (int c = -135; c <= 145; c += 10) grid.responder.push_back({Money{c}, 211});
  return grid;
}

struct CtResponderRule {
  double adherence = 1.0; // probability the reply follows ct_refusal_reply
};

inline void validate_rule(const CtResponderRule& rule) {
  if (!(rule.adherence >= 0.5 && rule.adherence <= 1.0))
    throw std::invalid_argument("responder adherence must lie in [1/2, 1]");
}

struct CtSynthParams {
  std::size_t n_subjects = 25;
  std::size_t n_records = 371;
  CtResponderRule rule;
  DeltaGrid grid = default_delta_grid();
  std::uint64_t seed = 0;
};

namespace detail {

inline Money draw_weighted(const std::vector<DeltaGridEntry>& side, SplitMix64& g) {
  std::uint64_t total = 0;
  for (const DeltaGridEntry& e : side) total += e.weight;
  std::uint64_t x = g.next_below(total);
  for (const DeltaGridEntry& e : side) {
    if (x < e.weight) return e.value;
    x -= e.weight;
  }
  return side.back().value; // unreachable
}

} // namespace detail

// Records come in contiguous per-subject blocks (block sizes differ by at
// most one, larger blocks first). Each record has its own derived stream:
// proposer draw, responder draw, adherence draw.
inline std::vector<CtRecord> synth_ct(const CtSynthParams& params) {
  validate_rule(params.rule);
  validate_grid(params.grid);
  if (params.n_subjects == 0 || params.n_records == 0)
    throw std::invalid_argument("synth_ct: counts must be positive");

  std::vector<CtRecord> records;
  records.reserve(params.n_records);
  const std::size_t base = params.n_records / params.n_subjects;
  const std::size_t extra = params.n_records % params.n_subjects;
  std::size_t record_index = 0;
  for (std::size_t s = 0; s < params.n_subjects; ++s) {
    const std::size_t block = base + (s < extra ? 1 : 0);
    for (std::size_t i = 0; i < block; ++i, ++record_index) {
      SplitMix64 g(derive_subseed(params.seed, record_index));
      CtRecord rec;
      rec.subject_id = "s" + std::to_string(s + 1);
      rec.proposer_delta = detail::draw_weighted(params.grid.proposer, g);
      rec.responder_delta = detail::draw_weighted(params.grid.responder, g);
      const bool rule_reply = ct_refusal_reply(rec.proposer_delta, rec.responder_delta);
      rec.accepted = g.next_bernoulli(params.rule.adherence) ? rule_reply : !rule_reply;
      records.push_back(std::move(rec));
    }
  }
  return records;
}

enum class CtPredictorKind : std::uint8_t {
  generating_rule,
  uniform_baseline,
  equilibrium_responder,
};

// Closed-form accuracy against replies generated by `rule` over `grid`.
// The equilibrium responder (accept iff responder_delta > 0) disagrees with
// the generating rule exactly on {responder_delta == 0, proposer_delta > 0},
// where it scores 1 - adherence instead of adherence.
inline double oracle_expected_accuracy(const CtResponderRule& rule, const DeltaGrid& grid,
                                       CtPredictorKind kind) {
  validate_rule(rule);
  validate_grid(grid);
  switch (kind) {
    case CtPredictorKind::generating_rule: return rule.adherence;
    case CtPredictorKind::uniform_baseline: return 0.5;
    case CtPredictorKind::equilibrium_responder: {
      std::uint64_t r_total = 0, r_zero = 0;
      for (const DeltaGridEntry& e : grid.responder) {
        r_total += e.weight;
        if (e.value == Money{0}) r_zero += e.weight;
      }
      std::uint64_t p_total = 0, p_pos = 0;
      for (const DeltaGridEntry& e : grid.proposer) {
        p_total += e.weight;
        if (e.value > Money{0}) p_pos += e.weight;
      }
      const double q = (static_cast<double>(r_zero) / static_cast<double>(r_total)) *
                       (static_cast<double>(p_pos) / static_cast<double>(p_total));
      return rule.adherence - q * (2.0 * rule.adherence - 1.0);
    }
  }
  throw std::invalid_argument("unknown predictor kind");
}

} // namespace gamemine
