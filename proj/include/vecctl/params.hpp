#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace vecctl {

/// Raised when a parameter set, schedule or state violates its invariants.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an integration or root-finding step cannot meet its contract.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Biological and epidemiological constants of the dengue models. All rates
/// are per day; b_H is stored per day even though it is quoted per year.
struct EpiParams {
  double b_M = 4.4;
  double b_W = 3.96;
  double d_M = 0.04;
  double d_W = 0.044;
  double d_S = 0.12;
  double s_h = 0.9;
  double s_c = 0.9;
  double K = 65234.0;
  double b_H = 0.013 / 365.0;
  double sigma_H = 0.2;
  double H = 65000.0;
  double beta_HM = 0.1647;
  double beta_MH = 0.1647;
  double beta_HW = 0.157;
  double beta_WH = 0.0785;
  double gamma_M = 0.186;
  double gamma_W = 0.146;
  double gamma_H = 0.17;

  /// Dengue values with the carrying capacity chosen so that the wild
  /// mosquito equilibrium K* equals the human population H.
  static EpiParams dengue();
  /// Dengue values with the carrying capacity printed in the parameter table
  /// (K = 65234), which gives K* slightly below H.
  static EpiParams dengue_printed_k();

  /// Wild-population equilibrium K(1 - d_M/b_M).
  [[nodiscard]] double k_star() const { return K * (1.0 - d_M / b_M); }

  /// Throws ValidationError naming the first violated invariant.
  void validate() const;

  [[nodiscard]] double get(std::string_view key) const;
  void set(std::string_view key, double value);
  [[nodiscard]] static const std::vector<std::string>& keys();
  [[nodiscard]] static bool has_key(std::string_view key);

  bool operator==(const EpiParams&) const = default;
};

/// Named presets accepted by configuration files and the CLI.
EpiParams params_preset(std::string_view name);

/// Parses flat `key = value` lines (with `#` comments). Unknown keys, duplicate
/// keys and malformed numbers are hard errors reporting the line number.
EpiParams parse_params(std::string_view text, EpiParams base = EpiParams::dengue());

/// Writes every parameter as `key = value` with round-trip precision.
std::string format_params(const EpiParams& params);

}  // namespace vecctl
