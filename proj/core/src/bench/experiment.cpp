#include "stackelberg/bench/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <thread>

#include "stackelberg/bench/trace_io.hpp"
#include "stackelberg/errors.hpp"

namespace stackelberg::bench {

using nlohmann::json;

namespace {

json vec_json(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

// NaN and infinities become null.
json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json report_json(const EquilibriumReport& r) {
  return {{"leader", to_string(r.leader)},
          {"method", to_string(r.method)},
          {"point", vec_json(r.point)},
          {"follower_point", vec_json(r.follower_point)},
          {"risk_L", num(r.risk_L)},
          {"risk_R", num(r.risk_R)},
          {"residual", num(r.residual)},
          {"warnings", r.warnings}};
}

json run_summary(const Trace& trace, const Schedule& schedule, const std::string& trace_file,
                 std::optional<double> target) {
  std::vector<double> L, R, gaps;
  for (const auto& rec : trace.epochs) {
    L.push_back(rec.L);
    R.push_back(rec.R);
    gaps.push_back(rec.br_gap);
  }
  json s = {{"order", to_string(trace.order)},
            {"trace_file", trace_file},
            {"T", schedule.T},
            {"tau", schedule.tau},
            {"epochs_completed", trace.epochs.size()},
            {"completed", trace.completed()},
            {"abort", trace.abort ? json{{"epoch", trace.abort->epoch}, {"message", trace.abort->message}}
                                  : json(nullptr)},
            {"final_center", vec_json(trace.final_center)}};

  if (trace.epochs.empty()) {
    s["terminal"] = nullptr;
    s["br_gap"] = nullptr;
    s["regret"] = {{"target", target ? num(*target) : json(nullptr)}, {"cumulative", nullptr}};
    return s;
  }
  const EpochRecord& last = trace.epochs.back();
  s["terminal"] = {{"L", num(last.L)},
                   {"R", num(last.R)},
                   {"running_avg_L", num(last.running_avg_L)},
                   {"running_avg_R", num(last.running_avg_R)},
                   {"window_mean_L", num(terminal_window_mean(L))},
                   {"window_mean_R", num(terminal_window_mean(R))}};

  double gap_sum = 0.0, gap_max = 0.0;
  for (double g : gaps) {
    gap_sum += g;
    gap_max = std::max(gap_max, g);
  }
  s["br_gap"] = {{"sum", num(gap_sum)},
                 {"mean", num(gap_sum / static_cast<double>(gaps.size()))},
                 {"max", num(gap_max)},
                 {"final", num(gaps.back())}};

  double regret = std::numeric_limits<double>::quiet_NaN();
  if (target) {
    regret = 0.0;
    for (const auto& rec : trace.epochs) regret += rec.stackelberg_risk - *target;
  }
  s["regret"] = {{"target", target ? num(*target) : json(nullptr)}, {"cumulative", num(regret)}};
  return s;
}

}  // namespace

const char* software_version() { return STACKELBERG_VERSION; }

ExperimentConfig apply_overrides(ExperimentConfig config, const Overrides& overrides) {
  if (overrides.seed) config.seed = *overrides.seed;
  if (overrides.scale) {
    if (*overrides.scale < 1) throw ConfigError("scale divisor must be >= 1");
    config.scale = *overrides.scale;
  }
  if (overrides.out_dir) config.output.dir = *overrides.out_dir;
  return config;
}

double terminal_window_mean(const std::vector<double>& values, double fraction) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  const auto n = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(values.size())));
  const std::size_t count = std::clamp<std::size_t>(n, 1, values.size());
  double sum = 0.0;
  for (std::size_t i = values.size() - count; i < values.size(); ++i) sum += values[i];
  return sum / static_cast<double>(count);
}

json equilibria_document(const ExperimentConfig& config) {
  try {
    const auto game = make_oracle_game(config.game, config.seed);
    const PreferenceTable table = preference_table(*game, resolve_oracle_options(config));
    return {{"decision_maker_leads", report_json(table.dm_leads)},
            {"agents_lead", report_json(table.agents_lead)},
            {"delta_L", num(table.delta_L)},
            {"delta_R", num(table.delta_R)}};
  } catch (const std::exception& e) {
    return {{"error", e.what()}};
  }
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  namespace fs = std::filesystem;

  const fs::path dir(config.output.dir);
  fs::create_directories(dir);

  ExperimentResult result;
  json equilibria = config.compute_equilibria ? equilibria_document(config) : json(nullptr);

  auto target_for = [&](Order order) -> std::optional<double> {
    if (!equilibria.is_object() || equilibria.contains("error")) return std::nullopt;
    const json& v = order == Order::kProactive ? equilibria["decision_maker_leads"]["risk_L"]
                                               : equilibria["agents_lead"]["risk_R"];
    if (!v.is_number()) return std::nullopt;
    return v.get<double>();
  };

  std::multiset<Order> orders;
  for (const auto& run : config.runs) orders.insert(run.order);

  const auto game = make_game(config.game, config.seed);
  const std::string digest = config_digest(config);
  json runs = json::array();
  for (std::size_t i = 0; i < config.runs.size(); ++i) {
    const RunSpec& spec = config.runs[i];
    const Schedule schedule = make_schedule(spec, config.scale);
    Trace trace = run_dynamics(*game, schedule, config.seed);
    trace.config_digest = digest;

    std::string name = config.output.prefix + "_";
    if (orders.count(spec.order) > 1) name += std::to_string(i) + "_";
    name += std::string(to_string(spec.order)) + ".csv";
    const fs::path path = dir / name;
    write_trace_file(path.string(), trace);
    result.trace_paths.push_back(path);

    std::optional<double> target = target_for(spec.order);
    if (!trace.epochs.empty() && !std::isfinite(trace.epochs.front().stackelberg_risk)) target.reset();
    runs.push_back(run_summary(trace, schedule, name, target));
    if (!trace.completed()) result.completed = false;
  }

  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  result.document = {{"schema_version", 1},
                     {"software_version", software_version()},
                     {"config", to_json(config)},
                     {"config_digest", digest},
                     {"equilibria", std::move(equilibria)},
                     {"runs", std::move(runs)},
                     {"completed", result.completed},
                     {"timing", {{"wall_clock_seconds", seconds}}}};

  result.results_path = dir / (config.output.prefix + "_results.json");
  std::ofstream out(result.results_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + result.results_path.string());
  out << result.document.dump(2) << '\n';
  return result;
}

std::vector<ExperimentResult> run_sweep(const std::vector<ExperimentConfig>& configs,
                                        unsigned workers) {
  std::set<std::filesystem::path> targets;
  for (const auto& c : configs) {
    const auto key = std::filesystem::path(c.output.dir) / c.output.prefix;
    if (!targets.insert(key).second)
      throw ConfigError("sweep: two configs write to the same output prefix " + key.string());
  }

  std::vector<ExperimentResult> results(configs.size());
  std::vector<std::exception_ptr> errors(configs.size());
  auto work = [&](std::size_t i) {
    try {
      results[i] = run_experiment(configs[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(configs.size())));
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < configs.size(); i = next++) work(i);
      });
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

}  // namespace stackelberg::bench
