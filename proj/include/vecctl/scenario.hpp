#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "vecctl/impulse.hpp"
#include "vecctl/optimizer.hpp"
#include "vecctl/params.hpp"

namespace vecctl {

/// The uncontrolled SEIR model has no release channel; it is simulated as the
/// SIT system without releases.
enum class ScenarioModel { sit, wb, seir };
std::string_view scenario_model_name(ScenarioModel model);
ScenarioModel parse_scenario_model(std::string_view name);

struct OptimizeRequest {
  std::size_t n = 10;
  double budget = 0.0;
  OptimizeMode mode = OptimizeMode::times_and_weights;
  std::size_t seeds = 5;
  std::uint64_t seed = 1;

  bool operator==(const OptimizeRequest&) const = default;
};

/// A complete simulation or optimization request.
///
///   [scenario]
///   model = sit
///   preset = dengue
///   T = 450
///   times = 0, 10
///   weights = 3e7, 3e7
///   trajectory = out.csv
///
///   [params]
///   K = 65234
struct Scenario {
  ScenarioModel model = ScenarioModel::sit;
  std::string preset = "dengue";
  EpiParams params = EpiParams::dengue();
  double ih0 = 20.0;
  double im0 = 20.0;
  double horizon = 450.0;
  std::vector<double> times;
  std::vector<double> weights;
  std::optional<double> budget;  // defaults to the sum of the weights
  std::optional<OptimizeRequest> optimize;
  SimTolerance tol{};
  std::string trajectory_csv;
  std::string summary_json;
  std::string history_csv;

  /// Release schedule for a literal scenario.
  [[nodiscard]] ReleaseSchedule schedule() const;
  /// Model kind used for simulation (seir maps to sit).
  [[nodiscard]] ModelKind kind() const;
  void validate() const;

  bool operator==(const Scenario&) const = default;
};

/// Parses a scenario file. Unknown sections and keys, duplicates and bad
/// values are ValidationErrors naming the line.
Scenario parse_scenario(std::string_view text);

/// Writes a scenario that parses back to an equal value. Parameters are
/// written only where they differ from the preset.
std::string format_scenario(const Scenario& scenario);

}  // namespace vecctl
