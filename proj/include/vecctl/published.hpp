#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "vecctl/impulse.hpp"
#include "vecctl/optimizer.hpp"

namespace vecctl {

/// Published uncontrolled costs (SIT and WB initial conditions).
inline constexpr double kPublishedJ0Sit = 293644.1;
inline constexpr double kPublishedJ0Wb = 294501.4;

/// One published result: the schedule the authors report and its cost.
struct PublishedRow {
  std::string table;  // sit10, sit20, sit10-fixed, sit20-fixed or wb
  std::string source;  // human-readable label such as "Table 2, C=3e7"
  ModelKind model = ModelKind::sit;
  OptimizeMode mode = OptimizeMode::times_and_weights;
  std::size_t n = 0;
  double budget = 0.0;
  ReleaseSchedule schedule;
  double cost = 0.0;
  double reduction = -1.0;  // percent; negative when the paper gives none
};

/// Table ids accepted by `reproduce`.
const std::vector<std::string>& table_ids();

/// Rows of one table; throws ValidationError for an unknown id.
std::vector<PublishedRow> published_rows(std::string_view table);

/// Every row of every table.
std::vector<PublishedRow> all_published_rows();

/// Relative tolerance for replaying a published schedule. Near-eradication
/// costs (below 1e4 person-days) get 15% or 500 absolute, whichever is looser.
bool replay_within(double cost, double published);

/// Tolerance for an optimizer run matching a published optimum: 5% for the
/// 10-release tables and the WB rows, 15% for the 20-release tables.
double optimizer_rtol(const PublishedRow& row);

/// Allowed gap in percentage points between reproduced and published
/// reductions: 5 for the C=6e7 rows with 10 releases, 3 otherwise.
double reduction_tolerance_pp(const PublishedRow& row);

}  // namespace vecctl
