#pragma once

// Shared builders for test fixtures.

#include <string>
#include <string_view>
#include <vector>

#include "gamemine/gamedata.hpp"

namespace gamemine::testutil {

// Builds an episode from parallel gesture strings like "RPS" / "SSR".
inline Episode episode(std::string subject, std::string thread, std::string_view own,
                       std::string_view opp) {
  Episode ep{std::move(subject), std::move(thread), {}};
  for (std::size_t i = 0; i < own.size(); ++i) {
    ep.turns.push_back(RpsTurn{static_cast<int>(i),
                               *gesture_from_token(std::string(1, own[i])),
                               *gesture_from_token(std::string(1, opp[i]))});
  }
  return ep;
}

// Single nominal attribute "x" plus nominal class "y"; instances given as
// (x value index, y value index) pairs.
inline Dataset tiny_nominal_dataset(std::vector<std::string> x_values,
                                    std::vector<std::string> y_values,
                                    const std::vector<std::pair<std::size_t, std::size_t>>& rows) {
  Dataset d;
  d.relation = "tiny";
  d.schema = {nominal_attribute("x", std::move(x_values)),
              nominal_attribute("y", std::move(y_values))};
  d.class_attribute = 1;
  for (const auto& [xv, yv] : rows) d.instances.push_back({Cell::nominal(xv), Cell::nominal(yv)});
  return d;
}

} // namespace gamemine::testutil
