#pragma once

#include <string_view>

namespace vecctl {

/// Written as `spec_version` into every JSON summary.
inline constexpr std::string_view kSpecVersion = "1.0";

}  // namespace vecctl
