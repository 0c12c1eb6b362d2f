#include "stackelberg/bench/config.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "stackelberg/errors.hpp"

namespace stackelberg::bench {

using nlohmann::json;

namespace {

std::string join_path(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

// Reads fields out of a JSON object, accumulating every problem instead of stopping at the first.
class Reader {
 public:
  explicit Reader(std::vector<std::string>& errors) : errors_(errors) {}

  void error(const std::string& path, const std::string& message) {
    errors_.push_back(path + ": " + message);
  }

  // Checks that `j` is an object whose keys are all in `allowed`.
  bool object(const json& j, const std::string& path, const std::set<std::string>& allowed) {
    if (!j.is_object()) {
      error(path.empty() ? "(root)" : path, "must be an object");
      return false;
    }
    for (const auto& [key, _] : j.items()) {
      if (!allowed.count(key)) error(join_path(path, key), "unknown field");
    }
    return true;
  }

  bool require(const json& obj, const std::string& path, const std::string& key) {
    if (obj.contains(key)) return true;
    error(join_path(path, key), "required field missing");
    return false;
  }

  std::optional<double> number(const json& obj, const std::string& path, const std::string& key) {
    if (!obj.contains(key)) return std::nullopt;
    const json& v = obj.at(key);
    if (!v.is_number()) {
      error(join_path(path, key), "must be a number");
      return std::nullopt;
    }
    const double x = v.get<double>();
    if (!std::isfinite(x)) {
      error(join_path(path, key), "must be finite");
      return std::nullopt;
    }
    return x;
  }

  std::optional<long long> integer(const json& obj, const std::string& path, const std::string& key) {
    if (!obj.contains(key)) return std::nullopt;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) {
      error(join_path(path, key), "must be an integer");
      return std::nullopt;
    }
    return v.get<long long>();
  }

  std::optional<bool> boolean(const json& obj, const std::string& path, const std::string& key) {
    if (!obj.contains(key)) return std::nullopt;
    const json& v = obj.at(key);
    if (!v.is_boolean()) {
      error(join_path(path, key), "must be a boolean");
      return std::nullopt;
    }
    return v.get<bool>();
  }

  std::optional<std::string> string(const json& obj, const std::string& path, const std::string& key) {
    if (!obj.contains(key)) return std::nullopt;
    const json& v = obj.at(key);
    if (!v.is_string()) {
      error(join_path(path, key), "must be a string");
      return std::nullopt;
    }
    return v.get<std::string>();
  }

  std::optional<std::vector<double>> numbers(const json& obj, const std::string& path,
                                             const std::string& key) {
    if (!obj.contains(key)) return std::nullopt;
    const json& v = obj.at(key);
    if (!v.is_array()) {
      error(join_path(path, key), "must be an array of numbers");
      return std::nullopt;
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number() || !std::isfinite(v[i].get<double>())) {
        error(join_path(path, key) + "[" + std::to_string(i) + "]", "must be a finite number");
        return std::nullopt;
      }
      out.push_back(v[i].get<double>());
    }
    return out;
  }

 private:
  std::vector<std::string>& errors_;
};

std::string fmt(double x) {
  std::ostringstream out;
  out << x;
  return out.str();
}

void check_range(Reader& r, const std::string& path, double value, double lo, double hi) {
  if (!(value >= lo && value <= hi))
    r.error(path, "value " + fmt(value) + " outside [" + fmt(lo) + ", " + fmt(hi) + "]");
}

void check_positive(Reader& r, const std::string& path, double value) {
  if (!(value > 0.0)) r.error(path, "value " + fmt(value) + " must be > 0");
}

void check_nonnegative(Reader& r, const std::string& path, double value) {
  if (!(value >= 0.0)) r.error(path, "value " + fmt(value) + " must be >= 0");
}

std::optional<GameKind> parse_kind(const std::string& s) {
  if (s == "linear") return GameKind::kLinear;
  if (s == "logistic-constrained") return GameKind::kLogisticConstrained;
  if (s == "logistic-costly") return GameKind::kLogisticCostly;
  return std::nullopt;
}

std::set<std::string> game_fields(GameKind kind) {
  switch (kind) {
    case GameKind::kLinear:
      return {"type", "beta", "sigma2", "B", "theta_radius"};
    case GameKind::kLogisticConstrained:
      return {"type", "p", "alpha", "n", "oracle_samples", "B", "theta_radius"};
    case GameKind::kLogisticCostly:
      return {"type", "p", "alpha", "n", "oracle_samples", "lambda", "theta_radius"};
  }
  return {};
}

GameSpec parse_game(Reader& r, const json& j) {
  const std::string path = "game";
  GameSpec g;
  if (!j.is_object()) {
    r.error(path, "must be an object");
    return g;
  }
  std::optional<GameKind> kind;
  if (r.require(j, path, "type")) {
    if (auto s = r.string(j, path, "type")) {
      kind = parse_kind(*s);
      if (!kind) r.error("game.type", "unknown game type '" + *s +
                                          "' (expected linear, logistic-constrained or logistic-costly)");
    }
  }
  if (!kind) return g;
  g.kind = *kind;
  r.object(j, path, game_fields(g.kind));

  if (auto v = r.number(j, path, "theta_radius")) {
    g.theta_radius = *v;
    check_positive(r, "game.theta_radius", *v);
  }

  if (g.kind == GameKind::kLinear) {
    if (r.require(j, path, "beta")) {
      if (auto v = r.numbers(j, path, "beta")) {
        g.beta = *v;
        if (g.beta.empty()) r.error("game.beta", "must have at least one component");
      }
    }
    if (auto v = r.number(j, path, "sigma2")) {
      g.sigma2 = *v;
      check_nonnegative(r, "game.sigma2", *v);
    }
    if (r.require(j, path, "B")) {
      if (auto v = r.number(j, path, "B")) {
        g.B = *v;
        check_nonnegative(r, "game.B", *v);
      }
    }
    return g;
  }

  if (r.require(j, path, "p")) {
    if (auto v = r.number(j, path, "p")) {
      g.p = *v;
      check_range(r, "game.p", *v, 0.0, 1.0);
    }
  }
  if (r.require(j, path, "alpha")) {
    if (auto v = r.numbers(j, path, "alpha")) {
      g.alpha = *v;
      if (g.alpha.empty()) r.error("game.alpha", "must have at least one component");
    }
  }
  if (auto v = r.integer(j, path, "n")) {
    g.n = static_cast<int>(*v);
    if (*v < 1 || *v > 100000000) r.error("game.n", "value " + std::to_string(*v) + " must be >= 1");
  }
  if (j.contains("oracle_samples") && !j.at("oracle_samples").is_null()) {
    if (auto v = r.integer(j, path, "oracle_samples")) {
      g.oracle_samples = static_cast<int>(*v);
      if (*v < 1 || *v > 100000000)
        r.error("game.oracle_samples", "value " + std::to_string(*v) + " must be >= 1");
    }
  }
  if (g.kind == GameKind::kLogisticConstrained) {
    if (r.require(j, path, "B")) {
      if (auto v = r.number(j, path, "B")) {
        g.B = *v;
        check_nonnegative(r, "game.B", *v);
      }
    }
  } else if (r.require(j, path, "lambda")) {
    if (auto v = r.number(j, path, "lambda")) {
      g.lambda = *v;
      check_positive(r, "game.lambda", *v);
    }
  }
  return g;
}

std::optional<Order> parse_order(const std::string& s) {
  if (s == "proactive") return Order::kProactive;
  if (s == "reactive") return Order::kReactive;
  return std::nullopt;
}

std::optional<IterateMode> parse_mode(const std::string& s) {
  if (s == "last") return IterateMode::kLast;
  if (s == "averaged") return IterateMode::kAveraged;
  return std::nullopt;
}

StepSchedule parse_slow(Reader& r, const json& j, const std::string& path) {
  StepSchedule s;
  if (!r.object(j, path, {"eta0", "exponent_eta", "delta0", "exponent_delta", "dim_scaling"}))
    return s;
  if (r.require(j, path, "eta0")) {
    if (auto v = r.number(j, path, "eta0")) {
      s.eta0 = *v;
      check_positive(r, path + ".eta0", *v);
    }
  }
  if (r.require(j, path, "delta0")) {
    if (auto v = r.number(j, path, "delta0")) {
      s.delta0 = *v;
      check_positive(r, path + ".delta0", *v);
    }
  }
  if (auto v = r.number(j, path, "exponent_eta")) {
    s.exponent_eta = *v;
    check_nonnegative(r, path + ".exponent_eta", *v);
  }
  if (auto v = r.number(j, path, "exponent_delta")) {
    s.exponent_delta = *v;
    check_nonnegative(r, path + ".exponent_delta", *v);
  }
  if (auto v = r.boolean(j, path, "dim_scaling")) s.dim_scaling = *v;
  return s;
}

RunSpec parse_run(Reader& r, const json& j, const std::string& path) {
  RunSpec run;
  if (!r.object(j, path, {"order", "T", "tau", "slow", "fast_eta", "iterate_mode", "constant_delta"}))
    return run;
  if (r.require(j, path, "order")) {
    if (auto s = r.string(j, path, "order")) {
      if (auto o = parse_order(*s)) {
        run.order = *o;
      } else {
        r.error(path + ".order", "unknown order '" + *s + "' (expected proactive or reactive)");
      }
    }
  }
  if (r.require(j, path, "T")) {
    if (auto v = r.integer(j, path, "T")) {
      run.T = static_cast<long>(*v);
      if (*v < 1) r.error(path + ".T", "value " + std::to_string(*v) + " must be >= 1");
    }
  }
  if (r.require(j, path, "tau")) {
    if (auto v = r.integer(j, path, "tau")) {
      run.tau = static_cast<int>(*v);
      if (*v < 1 || *v > 100000000) r.error(path + ".tau", "value " + std::to_string(*v) + " must be >= 1");
    }
  }
  if (r.require(j, path, "slow")) run.slow = parse_slow(r, j.at("slow"), path + ".slow");
  if (auto v = r.number(j, path, "fast_eta")) {
    run.fast_eta = *v;
    check_nonnegative(r, path + ".fast_eta", *v);
  }
  if (auto s = r.string(j, path, "iterate_mode")) {
    if (auto m = parse_mode(*s)) {
      run.iterate_mode = *m;
    } else {
      r.error(path + ".iterate_mode", "unknown mode '" + *s + "' (expected last or averaged)");
    }
  }
  if (auto v = r.boolean(j, path, "constant_delta")) run.constant_delta = *v;
  return run;
}

OracleOptions parse_oracle(Reader& r, const json& j) {
  const std::string path = "oracle";
  OracleOptions o;
  if (!r.object(j, path, {"grid", "lattice", "inner_steps", "inner_eta", "inner_tol", "half_width",
                          "outer_steps", "outer_eta", "outer_tol"}))
    return o;
  auto positive_int = [&](const char* key, int& out) {
    if (auto v = r.integer(j, path, key)) {
      out = static_cast<int>(*v);
      if (*v < 1 || *v > 100000000) r.error(join_path(path, key), "value " + std::to_string(*v) + " must be >= 1");
    }
  };
  auto positive_num = [&](const char* key, double& out) {
    if (auto v = r.number(j, path, key)) {
      out = *v;
      check_positive(r, join_path(path, key), *v);
    }
  };
  positive_int("grid", o.grid.grid);
  positive_int("lattice", o.grid.lattice);
  positive_int("inner_steps", o.grid.inner_steps);
  positive_num("inner_eta", o.grid.inner_eta);
  positive_num("inner_tol", o.grid.inner_tol);
  if (j.contains("half_width") && !j.at("half_width").is_null()) {
    if (auto v = r.number(j, path, "half_width")) {
      o.grid.half_width = *v;
      check_nonnegative(r, "oracle.half_width", *v);
    }
  }
  positive_int("outer_steps", o.outer.steps);
  positive_num("outer_eta", o.outer.eta);
  positive_num("outer_tol", o.outer.tol);
  return o;
}

std::set<std::string> sweepable(GameKind kind) {
  switch (kind) {
    case GameKind::kLinear:
      return {"B", "sigma2"};
    case GameKind::kLogisticConstrained:
      return {"B", "p"};
    case GameKind::kLogisticCostly:
      return {"lambda", "p"};
  }
  return {};
}

const std::set<std::string> kTopLevel = {"preset", "game",   "runs",   "seed",
                                         "scale",  "output", "oracle", "compute_equilibria",
                                         "sweep"};

// --- presets -------------------------------------------------------------------------------

json slow_json(double eta0, double delta0) {
  return {{"eta0", eta0},
          {"exponent_eta", 0.75},
          {"delta0", delta0},
          {"exponent_delta", 0.25},
          {"dim_scaling", false}};
}

json run_json(const char* order, long T, int tau, json slow, double fast_eta) {
  return {{"order", order},       {"T", T},
          {"tau", tau},           {"slow", std::move(slow)},
          {"fast_eta", fast_eta}, {"iterate_mode", "last"},
          {"constant_delta", false}};
}

json base_document(const std::string& name, json game, json runs, long scale) {
  return {{"preset", name},
          {"game", std::move(game)},
          {"runs", std::move(runs)},
          {"seed", 0},
          {"scale", scale},
          {"output", {{"dir", "results"}, {"prefix", name}}},
          {"compute_equilibria", true}};
}

struct PresetTable {
  std::vector<std::string> names;
  std::map<std::string, json> docs;

  void add(const std::string& name, json doc) {
    names.push_back(name);
    docs.emplace(name, std::move(doc));
  }
};

const PresetTable& presets() {
  static const PresetTable table = [] {
    PresetTable t;
    const std::pair<const char*, double> ps[] = {{"0.1", 0.1}, {"0.5", 0.5}, {"0.9", 0.9}};

    // Constrained logistic agents (alpha = 2, d = 1): decision-maker step depends on p.
    const double dm_eta0[] = {6.0, 5.0, 10.0};
    for (const auto& [fig, B] : {std::pair<const char*, double>{"fig2", 2.0}, {"fig3", 1.0}}) {
      for (int i = 0; i < 3; ++i) {
        const std::string name =
            std::string(fig) + "-p" + ps[i].first + "-B" + (B == 2.0 ? "2" : "1");
        json game = {{"type", "logistic-constrained"}, {"p", ps[i].second}, {"alpha", {2.0}},
                     {"n", 100}, {"oracle_samples", 1000}, {"B", B}};
        json runs = json::array({run_json("proactive", 50000, 200, slow_json(dm_eta0[i], 1.0), 0.1),
                                 run_json("reactive", 50000, 200, slow_json(0.02, 1.0), 0.1)});
        t.add(name, base_document(name, std::move(game), std::move(runs), 10));
      }
    }

    // Costly logistic agents (alpha = 1.5 (1, 1), d = 2).
    for (const auto& [fig, lam, dm_eta] :
         {std::tuple<const char*, double, double>{"fig4", 1.0, 0.1}, {"fig5", 20.0, 1.0}}) {
      for (int i = 0; i < 3; ++i) {
        const std::string name = std::string(fig) + "-lam" + (lam == 1.0 ? "1" : "20") + "-p" +
                                 ps[i].first;
        json game = {{"type", "logistic-costly"}, {"p", ps[i].second}, {"alpha", {1.5, 1.5}},
                     {"n", 100}, {"oracle_samples", 1000}, {"lambda", lam}};
        json runs = json::array({run_json("proactive", 50000, 100, slow_json(dm_eta, 1.0), 0.01),
                                 run_json("reactive", 50000, 100, slow_json(0.01, 1.0), 0.1)});
        t.add(name, base_document(name, std::move(game), std::move(runs), 10));
      }
    }

    // Linear regression game at desk scale.
    for (const auto& [name, B] : {std::pair<const char*, double>{"linear-B2", 2.0}, {"linear-B1", 1.0}}) {
      json game = {{"type", "linear"}, {"beta", {1.0, 0.0}}, {"sigma2", 0.0}, {"B", B}};
      json runs = json::array({run_json("proactive", 5000, 50, slow_json(0.03, 0.4), 0.1),
                               run_json("reactive", 5000, 50, slow_json(0.2, 2.0), 0.3)});
      t.add(name, base_document(name, std::move(game), std::move(runs), 1));
    }
    return t;
  }();
  return table;
}

}  // namespace

const char* to_string(GameKind kind) {
  switch (kind) {
    case GameKind::kLinear:
      return "linear";
    case GameKind::kLogisticConstrained:
      return "logistic-constrained";
    case GameKind::kLogisticCostly:
      return "logistic-costly";
  }
  return "unknown";
}

int GameSpec::dim() const {
  return static_cast<int>(kind == GameKind::kLinear ? beta.size() : alpha.size());
}

ConfigValidationError::ConfigValidationError(std::vector<std::string> errors)
    : std::runtime_error([&] {
        std::string msg = "invalid config:";
        for (const auto& e : errors) msg += "\n  " + e;
        return msg;
      }()),
      errors_(std::move(errors)) {}

std::vector<std::string> preset_names() { return presets().names; }

json preset_document(const std::string& name) {
  const auto& docs = presets().docs;
  const auto it = docs.find(name);
  if (it == docs.end()) {
    std::string known;
    for (const auto& n : presets().names) known += (known.empty() ? "" : ", ") + n;
    throw ConfigValidationError({"preset: unknown preset '" + name + "' (known: " + known + ")"});
  }
  return it->second;
}

ExperimentConfig parse_config(const json& input) {
  std::vector<std::string> errors;
  Reader r(errors);
  ExperimentConfig cfg;

  json doc = input;
  if (doc.is_object() && doc.contains("preset")) {
    if (!doc.at("preset").is_string()) {
      r.error("preset", "must be a string");
    } else {
      const std::string name = doc.at("preset").get<std::string>();
      json expanded;
      try {
        expanded = preset_document(name);
      } catch (const ConfigValidationError& e) {
        errors.insert(errors.end(), e.errors().begin(), e.errors().end());
      }
      if (!expanded.is_null()) {
        expanded.merge_patch(doc);
        doc = std::move(expanded);
        cfg.preset = name;
      }
    }
  }

  if (!r.object(doc, "", kTopLevel)) throw ConfigValidationError(errors);

  if (r.require(doc, "", "game")) cfg.game = parse_game(r, doc.at("game"));
  if (r.require(doc, "", "runs")) {
    const json& runs = doc.at("runs");
    if (!runs.is_array()) {
      r.error("runs", "must be an array");
    } else {
      for (std::size_t i = 0; i < runs.size(); ++i)
        cfg.runs.push_back(parse_run(r, runs[i], "runs[" + std::to_string(i) + "]"));
    }
  }
  if (doc.contains("seed")) {
    const json& s = doc.at("seed");
    if (s.is_number_unsigned() || (s.is_number_integer() && s.get<long long>() >= 0)) {
      cfg.seed = s.get<std::uint64_t>();
    } else {
      r.error("seed", "must be a non-negative integer");
    }
  }
  if (auto v = r.integer(doc, "", "scale")) {
    cfg.scale = static_cast<long>(*v);
    if (*v < 1) r.error("scale", "value " + std::to_string(*v) + " must be >= 1");
  }
  if (doc.contains("output")) {
    const json& o = doc.at("output");
    if (r.object(o, "output", {"dir", "prefix"})) {
      if (auto s = r.string(o, "output", "dir")) cfg.output.dir = *s;
      if (auto s = r.string(o, "output", "prefix")) {
        cfg.output.prefix = *s;
        if (s->empty() || s->find('/') != std::string::npos)
          r.error("output.prefix", "must be a non-empty file name without '/'");
      }
    }
  }
  if (doc.contains("oracle")) cfg.oracle = parse_oracle(r, doc.at("oracle"));
  if (auto v = r.boolean(doc, "", "compute_equilibria")) cfg.compute_equilibria = *v;
  if (doc.contains("sweep")) {
    const json& s = doc.at("sweep");
    if (!s.is_object()) {
      r.error("sweep", "must be an object");
    } else {
      const auto allowed = sweepable(cfg.game.kind);
      for (const auto& [key, _] : s.items()) {
        if (!allowed.count(key)) {
          r.error("sweep." + key, std::string("not a sweepable parameter of game type ") +
                                      to_string(cfg.game.kind));
          continue;
        }
        if (auto v = r.numbers(s, "sweep", key)) cfg.sweep[key] = *v;
      }
    }
  }

  if (!errors.empty()) throw ConfigValidationError(std::move(errors));
  return cfg;
}

ExperimentConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigValidationError({std::string("(document): malformed JSON: ") + e.what()});
  }
  return parse_config(doc);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigValidationError({path + ": cannot open file"});
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

json to_json(const ExperimentConfig& c) {
  json game = {{"type", to_string(c.game.kind)}, {"theta_radius", c.game.theta_radius}};
  if (c.game.kind == GameKind::kLinear) {
    game["beta"] = c.game.beta;
    game["sigma2"] = c.game.sigma2;
    game["B"] = c.game.B;
  } else {
    game["p"] = c.game.p;
    game["alpha"] = c.game.alpha;
    game["n"] = c.game.n;
    game["oracle_samples"] = c.game.oracle_samples ? json(*c.game.oracle_samples) : json(nullptr);
    if (c.game.kind == GameKind::kLogisticConstrained) {
      game["B"] = c.game.B;
    } else {
      game["lambda"] = c.game.lambda;
    }
  }

  json runs = json::array();
  for (const RunSpec& run : c.runs) {
    runs.push_back({{"order", to_string(run.order)},
                    {"T", run.T},
                    {"tau", run.tau},
                    {"slow",
                     {{"eta0", run.slow.eta0},
                      {"exponent_eta", run.slow.exponent_eta},
                      {"delta0", run.slow.delta0},
                      {"exponent_delta", run.slow.exponent_delta},
                      {"dim_scaling", run.slow.dim_scaling}}},
                    {"fast_eta", run.fast_eta},
                    {"iterate_mode", to_string(run.iterate_mode)},
                    {"constant_delta", run.constant_delta}});
  }

  json oracle = {{"grid", c.oracle.grid.grid},
                 {"lattice", c.oracle.grid.lattice},
                 {"inner_steps", c.oracle.grid.inner_steps},
                 {"inner_eta", c.oracle.grid.inner_eta},
                 {"inner_tol", c.oracle.grid.inner_tol},
                 {"half_width", c.oracle.grid.half_width ? json(*c.oracle.grid.half_width) : json(nullptr)},
                 {"outer_steps", c.oracle.outer.steps},
                 {"outer_eta", c.oracle.outer.eta},
                 {"outer_tol", c.oracle.outer.tol}};

  json out = {{"game", std::move(game)},
              {"runs", std::move(runs)},
              {"seed", c.seed},
              {"scale", c.scale},
              {"output", {{"dir", c.output.dir}, {"prefix", c.output.prefix}}},
              {"oracle", std::move(oracle)},
              {"compute_equilibria", c.compute_equilibria}};
  if (c.preset) out["preset"] = *c.preset;
  if (!c.sweep.empty()) out["sweep"] = c.sweep;
  return out;
}

Schedule make_schedule(const RunSpec& run, long scale) {
  if (scale < 1) throw ConfigError("scale must be >= 1");
  Schedule s;
  s.order = run.order;
  s.T = std::max(1L, run.T / scale);
  s.tau = run.tau;
  s.slow = run.slow;
  if (run.constant_delta) s.slow.constant_delta_horizon = s.T;
  s.fast_eta = run.fast_eta;
  s.iterate_mode = run.iterate_mode;
  return s;
}

namespace {

Vec to_vec(const std::vector<double>& v) {
  return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::unique_ptr<Game> logistic_game(const GameSpec& spec, int n, std::uint64_t seed, Stream stream) {
  PopulationSpec pop;
  pop.p = spec.p;
  pop.alpha = to_vec(spec.alpha);
  pop.n = n;
  pop.seed = seed;
  pop.stream = stream;
  auto samples = generate_population(pop);
  if (spec.kind == GameKind::kLogisticConstrained)
    return std::make_unique<LogisticGame>(std::move(samples), AgentVariant::kConstrained, spec.B,
                                          spec.theta_radius);
  return std::make_unique<LogisticGame>(std::move(samples), AgentVariant::kCostly, spec.lambda,
                                        spec.theta_radius);
}

}  // namespace

std::unique_ptr<Game> make_game(const GameSpec& spec, std::uint64_t seed) {
  if (spec.kind == GameKind::kLinear)
    return std::make_unique<LinearRegressionGame>(to_vec(spec.beta), spec.sigma2, spec.B,
                                                  spec.theta_radius);
  return logistic_game(spec, spec.n, seed, Stream::kData);
}

std::unique_ptr<Game> make_oracle_game(const GameSpec& spec, std::uint64_t seed) {
  if (spec.kind == GameKind::kLinear || !spec.oracle_samples) return make_game(spec, seed);
  return logistic_game(spec, *spec.oracle_samples, seed, Stream::kOracleData);
}

OracleOptions resolve_oracle_options(const ExperimentConfig& config) {
  OracleOptions o = config.oracle;
  if (!o.grid.half_width && config.game.kind == GameKind::kLogisticCostly) {
    double alpha_norm = 0.0;
    for (double a : config.game.alpha) alpha_norm += a * a;
    o.grid.half_width = 3.0 * std::sqrt(alpha_norm) / config.game.lambda + 1.0;
  }
  return o;
}

std::string config_digest(const ExperimentConfig& config) {
  // FNV-1a over the canonical serialization. Where the files go does not change the experiment.
  json doc = to_json(config);
  doc["output"].erase("dir");
  const std::string text = doc.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

}  // namespace stackelberg::bench
