#include "stackelberg/bench/regret.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "stackelberg/bench/trace_io.hpp"
#include "stackelberg/errors.hpp"

namespace stackelberg::bench {

SlopeFit fit_regret_slope(const std::vector<RegretPoint>& points) {
  std::set<double> horizons;
  for (const auto& p : points) {
    if (!(p.horizon > 0.0) || !std::isfinite(p.horizon))
      throw ConfigError("fit_regret_slope: horizons must be positive");
    horizons.insert(p.horizon);
  }
  if (horizons.size() < 3) throw ConfigError("fit_regret_slope: needs at least 3 distinct horizons");

  SlopeFit fit;
  std::vector<std::pair<double, double>> xy;
  for (const auto& p : points) {
    if (!(p.regret > 0.0) || !std::isfinite(p.regret)) {
      std::ostringstream msg;
      msg << "horizon " << p.horizon << ": regret " << p.regret << " is not positive; point excluded";
      fit.warnings.push_back(msg.str());
      continue;
    }
    xy.emplace_back(std::log(p.horizon), std::log(p.regret));
  }
  std::set<double> used_x;
  for (const auto& [x, _] : xy) used_x.insert(x);
  if (used_x.size() < 2) throw ConfigError("fit_regret_slope: fewer than 2 horizons with positive regret");

  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : xy) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(xy.size());
  my /= static_cast<double>(xy.size());
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : xy) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.points_used = xy.size();
  return fit;
}

double cumulative_stackelberg_regret(const Trace& trace, double target) {
  double sum = 0.0;
  for (const auto& rec : trace.epochs) {
    if (!std::isfinite(rec.stackelberg_risk))
      throw DiagnosticUnavailable("cumulative_stackelberg_regret: trace has no Stackelberg risk");
    sum += rec.stackelberg_risk - target;
  }
  return sum;
}

double load_regret_target(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open targets file " + path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path + ": malformed JSON: " + e.what());
  }
  if (doc.contains("risk_L") && doc["risk_L"].is_number()) return doc["risk_L"].get<double>();
  const auto ptr = nlohmann::json::json_pointer("/equilibria/decision_maker_leads/risk_L");
  if (doc.contains(ptr) && doc[ptr].is_number()) return doc[ptr].get<double>();
  throw ConfigError(path + ": no risk_L target (expected \"risk_L\" or a results document)");
}

SlopeFit fit_regret_slope_files(const std::vector<std::string>& trace_paths, double target) {
  std::map<double, std::pair<double, int>> by_horizon;
  std::vector<std::string> warnings;
  for (const auto& path : trace_paths) {
    const TraceTable table = read_trace_file(path);
    if (table.abort_marker) warnings.push_back(path + ": aborted trace (" + *table.abort_marker + ")");
    const std::size_t col = table.column("L");
    double regret = 0.0;
    for (const auto& row : table.rows) regret += row[col] - target;
    auto& [sum, count] = by_horizon[static_cast<double>(table.rows.size())];
    sum += regret;
    ++count;
  }
  std::vector<RegretPoint> points;
  for (const auto& [horizon, acc] : by_horizon)
    points.push_back({horizon, acc.first / static_cast<double>(acc.second)});
  SlopeFit fit = fit_regret_slope(points);
  fit.warnings.insert(fit.warnings.begin(), warnings.begin(), warnings.end());
  return fit;
}

}  // namespace stackelberg::bench
