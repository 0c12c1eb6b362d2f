#include "stackelberg/bench/preference.hpp"

#include <atomic>
#include <fstream>
#include <ostream>
#include <thread>

#include "stackelberg/bench/trace_io.hpp"
#include "stackelberg/errors.hpp"

namespace stackelberg::bench {

namespace {

void set_param(GameSpec& game, const std::string& key, double value) {
  if (key == "B") {
    game.B = value;
  } else if (key == "p") {
    game.p = value;
  } else if (key == "lambda") {
    game.lambda = value;
  } else if (key == "sigma2") {
    game.sigma2 = value;
  } else {
    throw ConfigError("sweep: unknown parameter '" + key + "'");
  }
}

std::string cell(double x) { return format_double(x); }

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

}  // namespace

std::vector<ExperimentConfig> expand_sweep(const ExperimentConfig& config) {
  std::vector<ExperimentConfig> out{config};
  out.front().sweep.clear();
  for (const auto& [key, values] : config.sweep) {
    std::vector<ExperimentConfig> next;
    for (const auto& base : out) {
      for (double v : values) {
        ExperimentConfig c = base;
        set_param(c.game, key, v);
        next.push_back(std::move(c));
      }
    }
    out = std::move(next);
  }
  return out;
}

std::vector<PreferenceRow> compute_preference_rows(const std::vector<ExperimentConfig>& configs,
                                                   unsigned workers) {
  std::vector<PreferenceRow> rows(configs.size());
  auto work = [&](std::size_t i) {
    const ExperimentConfig& c = configs[i];
    rows[i].game = c.game;
    try {
      const auto game = make_oracle_game(c.game, c.seed);
      OracleOptions options = resolve_oracle_options(c);
      options.grid.workers = 1;
      rows[i].table = preference_table(*game, options);
    } catch (const std::exception& e) {
      rows[i].error = e.what();
    }
  };

  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(configs.size())));
  if (workers <= 1) {
    for (std::size_t i = 0; i < configs.size(); ++i) work(i);
    return rows;
  }
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < configs.size(); i = next++) work(i);
      });
  }
  return rows;
}

void write_preference_csv(std::ostream& out, const std::vector<PreferenceRow>& rows) {
  out << "game,p,B,lambda,sigma2,risk_L_dm_leads,risk_L_agents_lead,risk_R_dm_leads,"
         "risk_R_agents_lead,delta_L,delta_R,error\n";
  for (const auto& row : rows) {
    const GameSpec& g = row.game;
    out << to_string(g.kind) << ',';
    out << (g.kind != GameKind::kLinear ? cell(g.p) : "") << ',';
    out << (g.kind != GameKind::kLogisticCostly ? cell(g.B) : "") << ',';
    out << (g.kind == GameKind::kLogisticCostly ? cell(g.lambda) : "") << ',';
    out << (g.kind == GameKind::kLinear ? cell(g.sigma2) : "") << ',';
    if (row.table) {
      const PreferenceTable& t = *row.table;
      out << cell(t.dm_leads.risk_L) << ',' << cell(t.agents_lead.risk_L) << ','
          << cell(t.dm_leads.risk_R) << ',' << cell(t.agents_lead.risk_R) << ',' << cell(t.delta_L)
          << ',' << cell(t.delta_R) << ',';
    } else {
      out << ",,,,,,";
    }
    out << csv_escape(row.error) << '\n';
  }
}

void export_preference_table(const std::vector<ExperimentConfig>& configs, const std::string& path,
                             unsigned workers) {
  const auto rows = compute_preference_rows(configs, workers);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_preference_csv(out, rows);
}

}  // namespace stackelberg::bench
