#include "vecctl/scenario.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "vecctl/textio.hpp"

namespace vecctl {

std::string_view scenario_model_name(ScenarioModel model) {
  switch (model) {
    case ScenarioModel::sit: return "sit";
    case ScenarioModel::wb: return "wb";
    case ScenarioModel::seir: return "seir";
  }
  return "sit";
}

ScenarioModel parse_scenario_model(std::string_view name) {
  if (name == "sit") return ScenarioModel::sit;
  if (name == "wb") return ScenarioModel::wb;
  if (name == "seir") return ScenarioModel::seir;
  throw ValidationError("unknown model '" + std::string(name) + "' (expected sit, wb or seir)");
}

ModelKind Scenario::kind() const { return model == ScenarioModel::wb ? ModelKind::wb : ModelKind::sit; }

ReleaseSchedule Scenario::schedule() const {
  ReleaseSchedule s;
  s.times = times;
  s.weights = weights;
  s.horizon = horizon;
  s.budget = budget ? *budget : s.total();
  return s;
}

void Scenario::validate() const {
  params.validate();
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ValidationError("T must be positive");
  if (!(ih0 >= 0.0) || !(im0 >= 0.0)) throw ValidationError("IH0 and IM0 must be nonnegative");
  if (!(tol.rtol > 0.0) || !(tol.atol > 0.0)) throw ValidationError("rtol and atol must be positive");
  if (optimize) {
    if (model == ScenarioModel::seir) throw ValidationError("the seir model has no releases to optimize");
    if (!times.empty() || !weights.empty()) {
      throw ValidationError("a scenario gives either a schedule or an optimizer request, not both");
    }
    if (optimize->n == 0) throw ValidationError("n must be at least 1");
    if (!(optimize->budget > 0.0)) throw ValidationError("C must be positive");
    if (optimize->seeds == 0) throw ValidationError("seeds must be at least 1");
    return;
  }
  if (model == ScenarioModel::seir && !times.empty()) {
    throw ValidationError("the seir model takes no releases");
  }
  schedule().validate();
}

namespace {

std::size_t parse_count(const KeyValueLine& kv) {
  const double v = parse_double(kv.value, kv.number, kv.key);
  if (!(v >= 0.0) || v != std::floor(v) || v > 1e9) {
    throw ValidationError("line " + std::to_string(kv.number) + ": key '" + kv.key +
                          "' expects a nonnegative integer");
  }
  return static_cast<std::size_t>(v);
}

}  // namespace

Scenario parse_scenario(std::string_view text) {
  Scenario sc;
  std::set<std::string> seen;
  std::vector<KeyValueLine> overrides;
  bool any_optimize = false;
  OptimizeRequest req;
  bool have_n = false;
  bool have_c = false;

  for (const auto& kv : split_key_values(text)) {
    const std::string where = "line " + std::to_string(kv.number) + ": ";
    if (kv.section.empty()) throw ValidationError(where + "key '" + kv.key + "' outside a section");
    if (!seen.insert(kv.section + "." + kv.key).second) {
      throw ValidationError(where + "duplicate key '" + kv.key + "'");
    }
    if (kv.section == "params") {
      if (!EpiParams::has_key(kv.key)) throw ValidationError(where + "unknown parameter key '" + kv.key + "'");
      overrides.push_back(kv);
      continue;
    }
    if (kv.section != "scenario") throw ValidationError(where + "unknown section '" + kv.section + "'");

    const auto& k = kv.key;
    auto number = [&] { return parse_double(kv.value, kv.number, k); };
    try {
      if (k == "model") sc.model = parse_scenario_model(kv.value);
      else if (k == "preset") {
        sc.preset = kv.value;
        params_preset(sc.preset);
      } else if (k == "IH0") sc.ih0 = number();
      else if (k == "IM0") sc.im0 = number();
      else if (k == "T") sc.horizon = number();
      else if (k == "times") sc.times = parse_double_list(kv.value, kv.number, k);
      else if (k == "weights") sc.weights = parse_double_list(kv.value, kv.number, k);
      else if (k == "budget") sc.budget = number();
      else if (k == "rtol") sc.tol.rtol = number();
      else if (k == "atol") sc.tol.atol = number();
      else if (k == "trajectory") sc.trajectory_csv = kv.value;
      else if (k == "summary") sc.summary_json = kv.value;
      else if (k == "history") sc.history_csv = kv.value;
      else if (k == "n") {
        req.n = parse_count(kv);
        have_n = any_optimize = true;
      } else if (k == "C") {
        req.budget = number();
        have_c = any_optimize = true;
      } else if (k == "mode") {
        req.mode = parse_mode(kv.value);
        any_optimize = true;
      } else if (k == "seeds") {
        req.seeds = parse_count(kv);
        any_optimize = true;
      } else if (k == "seed") {
        req.seed = parse_count(kv);
        any_optimize = true;
      } else {
        throw ValidationError("unknown scenario key '" + k + "'");
      }
    } catch (const ValidationError& e) {
      const std::string msg = e.what();
      if (msg.rfind("line ", 0) == 0) throw;
      throw ValidationError(where + msg);
    }
  }

  if (any_optimize) {
    if (!have_n || !have_c) throw ValidationError("an optimizer request needs both n and C");
    sc.optimize = req;
  }
  sc.params = params_preset(sc.preset);
  for (const auto& kv : overrides) sc.params.set(kv.key, parse_double(kv.value, kv.number, kv.key));
  sc.validate();
  return sc;
}

std::string format_scenario(const Scenario& sc) {
  std::ostringstream out;
  out << "[scenario]\n";
  out << "model = " << scenario_model_name(sc.model) << '\n';
  out << "preset = " << sc.preset << '\n';
  out << "IH0 = " << format_double(sc.ih0) << '\n';
  out << "IM0 = " << format_double(sc.im0) << '\n';
  out << "T = " << format_double(sc.horizon) << '\n';
  out << "rtol = " << format_double(sc.tol.rtol) << '\n';
  out << "atol = " << format_double(sc.tol.atol) << '\n';
  if (!sc.times.empty()) out << "times = " << format_double_list(sc.times) << '\n';
  if (!sc.weights.empty()) out << "weights = " << format_double_list(sc.weights) << '\n';
  if (sc.budget) out << "budget = " << format_double(*sc.budget) << '\n';
  if (sc.optimize) {
    out << "n = " << sc.optimize->n << '\n';
    out << "C = " << format_double(sc.optimize->budget) << '\n';
    out << "mode = " << mode_name(sc.optimize->mode) << '\n';
    out << "seeds = " << sc.optimize->seeds << '\n';
    out << "seed = " << sc.optimize->seed << '\n';
  }
  if (!sc.trajectory_csv.empty()) out << "trajectory = " << sc.trajectory_csv << '\n';
  if (!sc.summary_json.empty()) out << "summary = " << sc.summary_json << '\n';
  if (!sc.history_csv.empty()) out << "history = " << sc.history_csv << '\n';

  const EpiParams base = params_preset(sc.preset);
  bool header = false;
  for (const auto& key : EpiParams::keys()) {
    const double v = sc.params.get(key);
    if (v == base.get(key)) continue;
    if (!header) {
      out << "\n[params]\n";
      header = true;
    }
    out << key << " = " << format_double(v) << '\n';
  }
  return out.str();
}

}  // namespace vecctl
