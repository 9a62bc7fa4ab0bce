#pragma once

#include <string>
#include <vector>

#include "pa/io.hpp"

namespace pa {

/// Log-log SVG of regret against t, one polyline per (policy, instance) series.
/// Rows with t == 0 or non-positive regret are dropped.
std::string regret_svg(const std::vector<CsvRow>& rows, const std::string& title = "regret");

}  // namespace pa
