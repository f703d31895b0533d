#pragma once

// The simplification step: a sliding window over game history turns raw logs
// into classifier-ready datasets. Output instance order is part of the
// contract (episodes in input order, turns ascending); the evaluation
// protocol folds on that order.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "gamemine/gamedata.hpp"

namespace gamemine {

struct WindowConfig {
  int window = 3; // past turns per side
};

inline void validate_window(const WindowConfig& cfg) {
  if (cfg.window < 1) throw std::invalid_argument("window must be positive");
}

inline std::vector<std::string> gesture_value_list() { return {"R", "P", "S"}; }

// Window layout: own_prev_w .. own_prev_1, opp_prev_w .. opp_prev_1, next.
// One instance per turn t >= w; the first w turns of each episode carry no
// full history and produce no instance.
inline Dataset featurize_rps(const std::vector<Episode>& episodes, const WindowConfig& cfg) {
  validate_window(cfg);
  const int w = cfg.window;

  Dataset d;
  d.relation = "rps_w" + std::to_string(w);
  for (int k = w; k >= 1; --k)
    d.schema.push_back(nominal_attribute("own_prev_" + std::to_string(k), gesture_value_list()));
  for (int k = w; k >= 1; --k)
    d.schema.push_back(nominal_attribute("opp_prev_" + std::to_string(k), gesture_value_list()));
  d.schema.push_back(nominal_attribute("next", gesture_value_list()));
  d.class_attribute = d.schema.size() - 1;

  for (const Episode& ep : episodes) {
    if (static_cast<int>(ep.turns.size()) <= w)
      throw std::invalid_argument("episode (" + ep.subject_id + "," + ep.thread_id + ") has " +
                                  std::to_string(ep.turns.size()) +
                                  " turns, need more than window " + std::to_string(w));
    for (std::size_t t = static_cast<std::size_t>(w); t < ep.turns.size(); ++t) {
      Instance inst;
      inst.reserve(2 * static_cast<std::size_t>(w) + 1);
      for (int k = w; k >= 1; --k)
        inst.push_back(Cell::nominal(static_cast<std::size_t>(ep.turns[t - k].own)));
      for (int k = w; k >= 1; --k)
        inst.push_back(Cell::nominal(static_cast<std::size_t>(ep.turns[t - k].opp)));
      inst.push_back(Cell::nominal(static_cast<std::size_t>(ep.turns[t].own)));
      d.instances.push_back(std::move(inst));
    }
  }
  return d;
}

// CT tuples: proposer delta, responder delta, boolean reply. No
// discretization here; classifiers own their numeric handling.
inline Dataset featurize_ct(const std::vector<CtRecord>& records) {
  if (records.empty()) throw std::invalid_argument("featurize_ct: no records");
  Dataset d;
  d.relation = "ct";
  d.schema.push_back(numeric_attribute("proposer_delta"));
  d.schema.push_back(numeric_attribute("responder_delta"));
  d.schema.push_back(nominal_attribute("reply", {"accept", "reject"}));
  d.class_attribute = 2;
  for (const CtRecord& r : records) {
    Instance inst;
    inst.push_back(Cell::numeric(r.proposer_delta));
    inst.push_back(Cell::numeric(r.responder_delta));
    inst.push_back(Cell::nominal(r.accepted ? 0u : 1u));
    d.instances.push_back(std::move(inst));
  }
  return d;
}

inline constexpr std::size_t kReplyAccept = 0;
inline constexpr std::size_t kReplyReject = 1;

// alphabet^(2w+1) distinct window patterns.
inline std::uint64_t pattern_space_size(const WindowConfig& cfg, std::uint64_t alphabet) {
  validate_window(cfg);
  std::uint64_t result = 1;
  const int exponent = 2 * cfg.window + 1;
  for (int i = 0; i < exponent; ++i) {
    if (alphabet != 0 && result > ~std::uint64_t{0} / alphabet)
      throw std::overflow_error("pattern_space_size overflows 64 bits");
    result *= alphabet;
  }
  return result;
}

} // namespace gamemine
