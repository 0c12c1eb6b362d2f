#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "stackelberg/bench/config.hpp"
#include "stackelberg/bench/experiment.hpp"
#include "stackelberg/bench/preference.hpp"
#include "stackelberg/bench/regret.hpp"
#include "stackelberg/bench/trace_io.hpp"
#include "stackelberg/errors.hpp"

namespace stackelberg::bench {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path scratch_dir() {
  const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
  fs::path dir = fs::temp_directory_path() / "stackelberg_tests" /
                 (std::string(info->test_suite_name()) + "_" + info->name());
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> errors_of(const json& doc) {
  try {
    parse_config(doc);
  } catch (const ConfigValidationError& e) {
    return e.errors();
  }
  return {};
}

bool mentions(const std::vector<std::string>& errors, const std::string& needle) {
  for (const auto& e : errors)
    if (e.find(needle) != std::string::npos) return true;
  return false;
}

json linear_doc() {
  return json::parse(R"({
    "game": {"type": "linear", "beta": [1, 0], "sigma2": 0, "B": 2},
    "runs": [{"order": "proactive", "T": 200, "tau": 5, "slow": {"eta0": 0.03, "delta0": 0.4}}],
    "seed": 3
  })");
}

Trace synthetic_trace(long T, double target, double c, double exponent) {
  Trace t;
  double sum = 0.0;
  for (long s = 1; s <= T; ++s) {
    EpochRecord e;
    e.theta = Vec::Constant(1, 0.5);
    e.mu = Vec::Constant(1, -0.25);
    e.L = target + c * (std::pow(s, exponent) - std::pow(s - 1, exponent));
    e.stackelberg_risk = e.L;
    e.R = -e.L;
    sum += e.L;
    e.running_avg_L = sum / s;
    e.running_avg_R = -sum / s;
    t.epochs.push_back(e);
  }
  return t;
}

TEST(Config, PresetExpandsWithPublishedHorizons) {
  const ExperimentConfig c = parse_config(json{{"preset", "fig2-p0.1-B2"}});
  ASSERT_EQ(c.runs.size(), 2u);
  EXPECT_EQ(c.preset, "fig2-p0.1-B2");
  EXPECT_EQ(c.game.kind, GameKind::kLogisticConstrained);
  EXPECT_EQ(c.runs[0].T, 50000);
  EXPECT_EQ(c.runs[0].tau, 200);
  EXPECT_EQ(c.runs[0].order, Order::kProactive);
  EXPECT_DOUBLE_EQ(c.runs[0].slow.eta0, 6.0);
  EXPECT_DOUBLE_EQ(c.runs[0].fast_eta, 0.1);
  EXPECT_DOUBLE_EQ(c.runs[1].slow.eta0, 0.02);
  EXPECT_DOUBLE_EQ(c.game.B, 2.0);
  EXPECT_EQ(c.game.n, 100);
  EXPECT_EQ(c.scale, 10);
  EXPECT_EQ(make_schedule(c.runs[0], c.scale).T, 5000);
  EXPECT_EQ(make_schedule(c.runs[0], 1).T, 50000);
}

TEST(Config, CostlyPresets) {
  const ExperimentConfig c = parse_config(json{{"preset", "fig5-lam20-p0.9"}});
  EXPECT_EQ(c.game.kind, GameKind::kLogisticCostly);
  EXPECT_DOUBLE_EQ(c.game.lambda, 20.0);
  EXPECT_DOUBLE_EQ(c.game.p, 0.9);
  EXPECT_EQ(c.game.dim(), 2);
  EXPECT_EQ(c.runs[0].tau, 100);
  EXPECT_DOUBLE_EQ(c.runs[0].slow.eta0, 1.0);
  EXPECT_DOUBLE_EQ(c.runs[0].fast_eta, 0.01);
}

TEST(Config, OverridesMergeIntoPreset) {
  const ExperimentConfig c =
      parse_config(json{{"preset", "linear-B2"}, {"seed", 9}, {"game", {{"B", 1.0}}}});
  EXPECT_EQ(c.seed, 9u);
  EXPECT_DOUBLE_EQ(c.game.B, 1.0);
  EXPECT_EQ(c.game.beta.size(), 2u);
}

TEST(Config, ProbabilityOutOfRange) {
  json doc = to_json(parse_config(json{{"preset", "fig2-p0.1-B2"}}));
  doc.erase("preset");
  doc["game"]["p"] = 1.5;
  const auto errors = errors_of(doc);
  ASSERT_EQ(errors.size(), 1u);
  EXPECT_TRUE(mentions(errors, "game.p"));
  EXPECT_TRUE(mentions(errors, "1.5"));
  EXPECT_TRUE(mentions(errors, "[0, 1]"));
}

TEST(Config, EmptyDocumentListsRequiredFields) {
  const auto errors = errors_of(json::object());
  EXPECT_TRUE(mentions(errors, "game: required field missing"));
  EXPECT_TRUE(mentions(errors, "runs: required field missing"));
}

TEST(Config, CollectsEveryError) {
  json doc = linear_doc();
  doc["runs"][0]["T"] = 0;
  doc["runs"][0]["tau"] = -2;
  doc["game"]["sigma2"] = -1;
  doc["bogus"] = true;
  const auto errors = errors_of(doc);
  EXPECT_GE(errors.size(), 3u);
  EXPECT_TRUE(mentions(errors, "bogus: unknown field"));
}

TEST(Config, StrictPerGameFields) {
  json doc = linear_doc();
  doc["game"]["lambda"] = 1.0;
  EXPECT_TRUE(mentions(errors_of(doc), "game.lambda: unknown field"));
  doc = linear_doc();
  doc["runs"][0]["slow"]["eta"] = 1.0;
  EXPECT_TRUE(mentions(errors_of(doc), "runs[0].slow.eta: unknown field"));
  doc = linear_doc();
  doc["game"]["type"] = "probit";
  EXPECT_TRUE(mentions(errors_of(doc), "game.type"));
}

TEST(Config, Seeds) {
  json doc = linear_doc();
  doc["seed"] = 0;
  EXPECT_EQ(parse_config(doc).seed, 0u);
  doc["seed"] = -1;
  EXPECT_TRUE(mentions(errors_of(doc), "seed"));
  doc["seed"] = 1.5;
  EXPECT_TRUE(mentions(errors_of(doc), "seed"));
}

TEST(Config, UnknownPreset) {
  const auto errors = errors_of(json{{"preset", "fig9"}});
  EXPECT_TRUE(mentions(errors, "unknown preset 'fig9'"));
  EXPECT_TRUE(mentions(errors, "linear-B2"));
}

TEST(Config, SweepKeysDependOnGame) {
  json doc = linear_doc();
  doc["sweep"] = {{"B", {0.5, 1.0}}};
  EXPECT_EQ(parse_config(doc).sweep.at("B").size(), 2u);
  doc["sweep"] = {{"lambda", {1.0}}};
  EXPECT_TRUE(mentions(errors_of(doc), "sweep.lambda"));
}

TEST(Config, RoundTripsEveryPreset) {
  for (const auto& name : preset_names()) {
    const ExperimentConfig a = parse_config(json{{"preset", name}});
    const json j = to_json(a);
    const ExperimentConfig b = parse_config(j);
    EXPECT_EQ(to_json(b), j) << name;
    EXPECT_EQ(config_digest(a), config_digest(b)) << name;
  }
}

TEST(Config, RoundTripsExplicitDocument) {
  json doc = linear_doc();
  doc["sweep"] = {{"sigma2", {0.0, 0.5}}};
  doc["oracle"] = {{"grid", 55}, {"half_width", 2.5}};
  doc["runs"][0]["iterate_mode"] = "averaged";
  doc["runs"][0]["constant_delta"] = true;
  const json j = to_json(parse_config(doc));
  EXPECT_EQ(to_json(parse_config(j)), j);
  EXPECT_EQ(j["oracle"]["grid"], 55);
  EXPECT_EQ(j["runs"][0]["iterate_mode"], "averaged");
}

TEST(Config, DigestTracksContent) {
  const ExperimentConfig a = parse_config(linear_doc());
  ExperimentConfig b = a;
  EXPECT_EQ(config_digest(a), config_digest(b));
  b.output.dir = "somewhere/else";
  EXPECT_EQ(config_digest(a), config_digest(b));
  b.seed = 4;
  EXPECT_NE(config_digest(a), config_digest(b));
}

TEST(Config, ScheduleConversion) {
  ExperimentConfig c = parse_config(linear_doc());
  c.runs[0].constant_delta = true;
  const Schedule s = make_schedule(c.runs[0], 4);
  EXPECT_EQ(s.T, 50);
  ASSERT_TRUE(s.slow.constant_delta_horizon);
  EXPECT_EQ(*s.slow.constant_delta_horizon, 50);
  // never below one epoch
  EXPECT_EQ(make_schedule(c.runs[0], 100000).T, 1);
}

TEST(Config, Overrides) {
  Overrides o;
  o.seed = 17;
  o.scale = 5;
  o.out_dir = "elsewhere";
  const ExperimentConfig c = apply_overrides(parse_config(linear_doc()), o);
  EXPECT_EQ(c.seed, 17u);
  EXPECT_EQ(c.scale, 5);
  EXPECT_EQ(c.output.dir, "elsewhere");
  o.scale = 0;
  EXPECT_THROW(apply_overrides(c, o), ConfigError);
}

TEST(Config, OracleGameUsesSeparateSamples) {
  const ExperimentConfig c = parse_config(json{{"preset", "fig2-p0.5-B2"}});
  const auto dyn = make_game(c.game, c.seed);
  const auto oracle = make_oracle_game(c.game, c.seed);
  const auto& a = dynamic_cast<const LogisticGame&>(*dyn);
  const auto& b = dynamic_cast<const LogisticGame&>(*oracle);
  EXPECT_EQ(a.samples().size(), 100u);
  EXPECT_EQ(b.samples().size(), 1000u);
}

TEST(TraceCsv, FormatDoubleRoundTrips) {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 1e308, 123456789.123456789, 0.0}) {
    EXPECT_EQ(std::stod(format_double(x)), x);
  }
}

TEST(TraceCsv, HeaderAndRoundTrip) {
  const Trace t = synthetic_trace(25, 0.4, 1.3, 0.75);
  std::stringstream ss;
  write_trace_csv(ss, t);
  std::string header;
  std::getline(std::stringstream(ss.str()), header);
  EXPECT_EQ(header, "epoch,theta_0,mu_0,L,R,running_avg_L,running_avg_R,br_gap");
  const TraceTable table = read_trace_csv(ss);
  ASSERT_EQ(table.rows.size(), 25u);
  EXPECT_FALSE(table.abort_marker);
  for (std::size_t i = 0; i < 25; ++i) {
    EXPECT_EQ(table.rows[i][table.column("epoch")], double(i + 1));
    EXPECT_EQ(table.rows[i][table.column("L")], t.epochs[i].L);
    EXPECT_EQ(table.rows[i][table.column("running_avg_R")], t.epochs[i].running_avg_R);
  }
  EXPECT_THROW(table.column("nope"), ConfigError);
}

TEST(TraceCsv, AbortMarkerIsFlushed) {
  Trace t = synthetic_trace(3, 0.0, 1.0, 1.0);
  t.abort = AbortInfo{4, "non-finite iterate or loss"};
  const fs::path path = scratch_dir() / "aborted.csv";
  write_trace_file(path.string(), t);
  const std::string text = slurp(path);
  EXPECT_NE(text.find("# aborted at epoch 4: non-finite iterate or loss"), std::string::npos);
  const TraceTable table = read_trace_file(path.string());
  EXPECT_EQ(table.rows.size(), 3u);
  ASSERT_TRUE(table.abort_marker);
}

TEST(Regret, ExactPowerLaws) {
  std::vector<RegretPoint> three_quarters, linear;
  for (double T : {1000.0, 2000.0, 4000.0, 8000.0}) {
    three_quarters.push_back({T, 2.5 * std::pow(T, 0.75)});
    linear.push_back({T, 0.3 * T});
  }
  EXPECT_NEAR(fit_regret_slope(three_quarters).slope, 0.75, 1e-9);
  EXPECT_NEAR(fit_regret_slope(linear).slope, 1.0, 1e-9);
  EXPECT_NEAR(fit_regret_slope(linear).intercept, std::log(0.3), 1e-9);
}

TEST(Regret, NonPositivePointsAreDropped) {
  std::vector<RegretPoint> pts = {{1000, 10}, {2000, -1}, {4000, 40}, {8000, 80}};
  const SlopeFit fit = fit_regret_slope(pts);
  EXPECT_EQ(fit.points_used, 3u);
  EXPECT_EQ(fit.warnings.size(), 1u);
  EXPECT_THROW(fit_regret_slope({{1000, 1}, {1000, 2}, {2000, 3}}), ConfigError);
  EXPECT_THROW(fit_regret_slope({{1000, -1}, {2000, -2}, {4000, 3}}), ConfigError);
}

TEST(Regret, CumulativeAgainstTarget) {
  const Trace t = synthetic_trace(100, 0.4, 2.0, 0.75);
  EXPECT_NEAR(cumulative_stackelberg_regret(t, 0.4), 2.0 * std::pow(100, 0.75), 1e-9);
}

TEST(Regret, FromTraceFiles) {
  const fs::path dir = scratch_dir();
  std::vector<std::string> paths;
  for (long T : {200, 400, 800, 1600}) {
    for (int seed = 0; seed < 2; ++seed) {
      // the two seeds average to exactly 1.5 T^0.75
      const Trace t = synthetic_trace(T, 0.4, seed == 0 ? 1.0 : 2.0, 0.75);
      const fs::path p = dir / ("T" + std::to_string(T) + "_" + std::to_string(seed) + ".csv");
      write_trace_file(p.string(), t);
      paths.push_back(p.string());
    }
  }
  const SlopeFit fit = fit_regret_slope_files(paths, 0.4);
  EXPECT_NEAR(fit.slope, 0.75, 1e-9);
  EXPECT_EQ(fit.points_used, 4u);

  std::ofstream(dir / "plain.json") << R"({"risk_L": 0.4})";
  std::ofstream(dir / "results.json")
      << R"({"equilibria": {"decision_maker_leads": {"risk_L": 0.25}}})";
  EXPECT_DOUBLE_EQ(load_regret_target((dir / "plain.json").string()), 0.4);
  EXPECT_DOUBLE_EQ(load_regret_target((dir / "results.json").string()), 0.25);
  std::ofstream(dir / "bad.json") << R"({"x": 1})";
  EXPECT_THROW(load_regret_target((dir / "bad.json").string()), std::exception);
}

TEST(Experiment, WindowMean) {
  EXPECT_DOUBLE_EQ(terminal_window_mean({1, 2, 3, 4, 5, 6, 7, 8, 9, 10}), 10.0);
  EXPECT_DOUBLE_EQ(terminal_window_mean({1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11}), 10.5);
  EXPECT_DOUBLE_EQ(terminal_window_mean({4}), 4.0);
  EXPECT_TRUE(std::isnan(terminal_window_mean({})));
}

TEST(Experiment, WritesTracesAndResults) {
  ExperimentConfig c = parse_config(json{{"preset", "linear-B2"}});
  c.scale = 10;
  c.output.dir = scratch_dir().string();
  const ExperimentResult r = run_experiment(c);
  ASSERT_TRUE(r.completed);
  ASSERT_EQ(r.trace_paths.size(), 2u);
  EXPECT_EQ(r.trace_paths[0].filename(), "linear-B2_proactive.csv");
  EXPECT_EQ(read_trace_file(r.trace_paths[0].string()).rows.size(), 500u);

  const json doc = json::parse(slurp(r.results_path));
  EXPECT_EQ(doc["schema_version"], 1);
  EXPECT_EQ(doc["config_digest"], config_digest(c));
  EXPECT_NEAR(doc["equilibria"]["decision_maker_leads"]["risk_L"].get<double>(), 0.4, 1e-12);
  EXPECT_NEAR(doc["equilibria"]["agents_lead"]["risk_R"].get<double>(), -0.5, 1e-12);
  const json& pro = doc["runs"][0];
  EXPECT_EQ(pro["order"], "proactive");
  EXPECT_EQ(pro["epochs_completed"], 500);
  EXPECT_DOUBLE_EQ(pro["regret"]["target"].get<double>(), 0.4);
  EXPECT_TRUE(pro["regret"]["cumulative"].is_number());
  EXPECT_DOUBLE_EQ(doc["runs"][1]["regret"]["target"].get<double>(), -0.5);
  EXPECT_TRUE(doc["timing"]["wall_clock_seconds"].is_number());
}

TEST(Experiment, ByteIdenticalReruns) {
  ExperimentConfig c = parse_config(json{{"preset", "linear-B2"}});
  c.scale = 20;
  const fs::path dir = scratch_dir();
  c.output.dir = (dir / "a").string();
  const ExperimentResult a = run_experiment(c);
  c.output.dir = (dir / "b").string();
  const ExperimentResult b = run_experiment(c);
  for (std::size_t i = 0; i < a.trace_paths.size(); ++i)
    EXPECT_EQ(slurp(a.trace_paths[i]), slurp(b.trace_paths[i]));
  json da = a.document, db = b.document;
  for (json* d : {&da, &db}) {
    d->erase("timing");
    (*d)["config"]["output"].erase("dir");
  }
  EXPECT_EQ(da, db);
}

TEST(Experiment, RepeatedOrdersGetDistinctFiles) {
  json doc = linear_doc();
  doc["runs"].push_back(doc["runs"][0]);
  doc["compute_equilibria"] = false;
  ExperimentConfig c = parse_config(doc);
  c.output.dir = scratch_dir().string();
  const ExperimentResult r = run_experiment(c);
  ASSERT_EQ(r.trace_paths.size(), 2u);
  EXPECT_NE(r.trace_paths[0], r.trace_paths[1]);
  EXPECT_TRUE(r.document["equilibria"].is_null());
}

TEST(Experiment, SweepRejectsSharedPrefix) {
  ExperimentConfig c = parse_config(linear_doc());
  c.output.dir = scratch_dir().string();
  EXPECT_THROW(run_sweep({c, c}, 2), ConfigError);
  ExperimentConfig d = c;
  d.output.prefix = "other";
  d.seed = 8;
  const auto results = run_sweep({c, d}, 2);
  ASSERT_EQ(results.size(), 2u);
  EXPECT_EQ(results[1].document["config"]["seed"], 8);
}

// Desk-scale costly run: the decision-maker's risk ends lower when agents lead.
TEST(Experiment, CostlyOrderingAtReducedScale) {
  ExperimentConfig c = parse_config(json{{"preset", "fig4-lam1-p0.5"}});
  c.scale = 50;
  c.compute_equilibria = false;
  c.output.dir = scratch_dir().string();
  const ExperimentResult r = run_experiment(c);
  const json& runs = r.document["runs"];
  ASSERT_EQ(runs[0]["order"], "proactive");
  EXPECT_LE(runs[1]["terminal"]["running_avg_L"].get<double>(),
            runs[0]["terminal"]["running_avg_L"].get<double>());
}

TEST(Preference, ExpandSweep) {
  json doc = linear_doc();
  EXPECT_EQ(expand_sweep(parse_config(doc)).size(), 1u);
  doc["sweep"] = {{"B", {0.5, 1, 2}}, {"sigma2", {0, 1}}};
  const auto configs = expand_sweep(parse_config(doc));
  ASSERT_EQ(configs.size(), 6u);
  for (const auto& c : configs) EXPECT_TRUE(c.sweep.empty());
  doc["sweep"] = {{"B", json::array()}};
  EXPECT_TRUE(expand_sweep(parse_config(doc)).empty());
}

TEST(Preference, LinearSweepDeltas) {
  json doc = linear_doc();
  doc["sweep"] = {{"B", {0.5, 1, 2}}};
  const auto rows = compute_preference_rows(expand_sweep(parse_config(doc)));
  ASSERT_EQ(rows.size(), 3u);
  const double expect_L[] = {0, 0, 0.15}, expect_R[] = {0, 0, 0.1};
  for (std::size_t i = 0; i < 3; ++i) {
    ASSERT_TRUE(rows[i].table) << rows[i].error;
    EXPECT_NEAR(rows[i].table->delta_L, expect_L[i], 1e-12);
    EXPECT_NEAR(rows[i].table->delta_R, expect_R[i], 1e-12);
  }
  std::stringstream ss;
  write_preference_csv(ss, rows);
  std::string header;
  std::getline(ss, header);
  EXPECT_EQ(header,
            "game,p,B,lambda,sigma2,risk_L_dm_leads,risk_L_agents_lead,risk_R_dm_leads,"
            "risk_R_agents_lead,delta_L,delta_R,error");
}

TEST(Preference, FailuresAreRecordedPerRow) {
  json doc = linear_doc();
  doc["game"]["beta"] = {0, 0};
  const auto rows = compute_preference_rows({parse_config(doc), parse_config(linear_doc())});
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_FALSE(rows[0].table);
  EXPECT_FALSE(rows[0].error.empty());
  EXPECT_TRUE(rows[1].table);
}

TEST(Preference, EmptyGridGivesHeaderOnly) {
  const fs::path path = scratch_dir() / "empty.csv";
  export_preference_table({}, path.string());
  const std::string text = slurp(path);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1);
  EXPECT_EQ(text.rfind("game,p,B", 0), 0u);
}

}  // namespace
}  // namespace stackelberg::bench
