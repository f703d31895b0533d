#pragma once

#include <string_view>

namespace gamemine {

inline constexpr std::string_view kToolkitName = "gamemine";
inline constexpr std::string_view kToolkitVersion = "0.1.0";

} // namespace gamemine
