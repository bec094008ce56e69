#include "vecctl/params.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>
#include <utility>

#include "vecctl/textio.hpp"

namespace vecctl {
namespace {

using Field = double EpiParams::*;

const std::array<std::pair<const char*, Field>, 18>& field_table() {
  static const std::array<std::pair<const char*, Field>, 18> table{{
      {"b_M", &EpiParams::b_M},
      {"b_W", &EpiParams::b_W},
      {"d_M", &EpiParams::d_M},
      {"d_W", &EpiParams::d_W},
      {"d_S", &EpiParams::d_S},
      {"s_h", &EpiParams::s_h},
      {"s_c", &EpiParams::s_c},
      {"K", &EpiParams::K},
      {"b_H", &EpiParams::b_H},
      {"sigma_H", &EpiParams::sigma_H},
      {"H", &EpiParams::H},
      {"beta_HM", &EpiParams::beta_HM},
      {"beta_MH", &EpiParams::beta_MH},
      {"beta_HW", &EpiParams::beta_HW},
      {"beta_WH", &EpiParams::beta_WH},
      {"gamma_M", &EpiParams::gamma_M},
      {"gamma_W", &EpiParams::gamma_W},
      {"gamma_H", &EpiParams::gamma_H},
  }};
  return table;
}

Field find_field(std::string_view key) {
  for (const auto& [name, field] : field_table()) {
    if (key == name) return field;
  }
  throw ValidationError("unknown parameter key '" + std::string(key) + "'");
}

}  // namespace

EpiParams EpiParams::dengue() {
  EpiParams p;
  p.K = p.H / (1.0 - p.d_M / p.b_M);
  return p;
}

EpiParams EpiParams::dengue_printed_k() {
  EpiParams p;
  p.K = 65234.0;
  return p;
}

void EpiParams::validate() const {
  for (const auto& [name, field] : field_table()) {
    const double v = this->*field;
    if (!std::isfinite(v)) throw ValidationError(std::string(name) + " is not finite");
    if (field == &EpiParams::s_h) continue;
    if (v <= 0.0) throw ValidationError(std::string(name) + " must be strictly positive");
  }
  if (s_h < 0.0 || s_h > 1.0) throw ValidationError("s_h must lie in [0, 1]");
  if (s_c > 1.0) throw ValidationError("s_c must lie in (0, 1]");
  if (!(beta_WH < beta_HW && beta_HW < beta_HM)) {
    throw ValidationError("transmission rates must satisfy beta_WH < beta_HW < beta_HM");
  }
  const double ks = k_star();
  if (!(ks > 0.0 && ks < K)) throw ValidationError("K* = K(1 - d_M/b_M) must lie in (0, K)");
}

double EpiParams::get(std::string_view key) const { return this->*find_field(key); }

void EpiParams::set(std::string_view key, double value) { this->*find_field(key) = value; }

const std::vector<std::string>& EpiParams::keys() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& entry : field_table()) out.emplace_back(entry.first);
    return out;
  }();
  return names;
}

bool EpiParams::has_key(std::string_view key) {
  return std::any_of(field_table().begin(), field_table().end(),
                     [&](const auto& entry) { return key == entry.first; });
}

EpiParams params_preset(std::string_view name) {
  if (name == "dengue") return EpiParams::dengue();
  if (name == "printed-k") return EpiParams::dengue_printed_k();
  throw ValidationError("unknown parameter preset '" + std::string(name) +
                        "' (expected dengue or printed-k)");
}

EpiParams parse_params(std::string_view text, EpiParams base) {
  std::set<std::string, std::less<>> seen;
  for (const auto& line : split_key_values(text)) {
    if (!line.section.empty()) {
      throw ValidationError("line " + std::to_string(line.number) +
                            ": parameter files have no sections");
    }
    if (!EpiParams::has_key(line.key)) {
      throw ValidationError("line " + std::to_string(line.number) + ": unknown parameter key '" +
                            line.key + "'");
    }
    if (!seen.insert(line.key).second) {
      throw ValidationError("line " + std::to_string(line.number) + ": duplicate key '" +
                            line.key + "'");
    }
    base.set(line.key, parse_double(line.value, line.number, line.key));
  }
  base.validate();
  return base;
}

std::string format_params(const EpiParams& params) {
  std::ostringstream out;
  for (const auto& [name, field] : field_table()) {
    out << name << " = " << format_double(params.*field) << '\n';
  }
  return out.str();
}

}  // namespace vecctl
