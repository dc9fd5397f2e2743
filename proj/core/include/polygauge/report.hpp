// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

namespace polygauge {

/// Shortest-width deterministic decimal rendering of a double ("%.17g"
/// trimmed); identical bits give identical text on every platform.
std::string format_number(double v);

/// Assembles a CSV document with a fixed header. Fields are written as
/// given; callers format numbers through format_number.
std::string make_csv(const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& rows);

} // namespace polygauge
