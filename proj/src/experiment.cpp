#include "twoway/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <istream>
#include <sstream>
#include <thread>

#include "twoway/errors.hpp"
#include "twoway/fading.hpp"
#include "twoway/lower_bounds.hpp"
#include "twoway/montecarlo.hpp"
#include "twoway/protocol_dual.hpp"
#include "twoway/protocol_single.hpp"
#include "twoway/quantization.hpp"
#include "twoway/rng.hpp"
#include "twoway/special_functions.hpp"

namespace twoway {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

double to_double(const std::string& text, int line, const std::string& key) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size() || t.empty())
    throw ConfigError("expected a number, got '" + t + "'", line, key);
  if (!std::isfinite(v)) throw ConfigError("value must be finite", line, key);
  return v;
}

std::uint64_t to_u64(const std::string& text, int line, const std::string& key) {
  const std::string t = trim(text);
  std::uint64_t v = 0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size() || t.empty())
    throw ConfigError("expected a non-negative integer, got '" + t + "'", line, key);
  return v;
}

std::vector<double> to_list(const std::string& text, int line, const std::string& key) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw ConfigError("ranges are written start:stop:step", line, key);
    const double a = to_double(parts[0], line, key);
    const double b = to_double(parts[1], line, key);
    const double step = to_double(parts[2], line, key);
    if (!(step > 0.0) || b < a) throw ConfigError("range needs start <= stop and a positive step", line, key);
    const auto n = static_cast<std::int64_t>(std::floor((b - a) / step + 1e-9)) + 1;
    if (n > 100000) throw ConfigError("range has too many points", line, key);
    for (std::int64_t i = 0; i < n; ++i) out.push_back(a + static_cast<double>(i) * step);
    return out;
  }
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ',');) out.push_back(to_double(p, line, key));
  if (out.empty()) throw ConfigError("list is empty", line, key);
  return out;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

template <typename T>
std::string join(const std::vector<T>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    if constexpr (std::is_integral_v<T>) s += std::to_string(v[i]);
    else s += fmt(v[i]);
  }
  return s;
}

Mode parse_mode(const std::string& v, int line) {
  const std::string l = lower(v);
  if (l == "bounds") return Mode::BOUNDS;
  if (l == "protocol") return Mode::PROTOCOL;
  if (l == "mc") return Mode::MC;
  if (l == "figure") return Mode::FIGURE;
  throw ConfigError("unknown mode '" + v + "'", line, "mode");
}

FigureId parse_figure(const std::string& v, int line) {
  const std::string l = lower(v);
  if (l == "numeric1") return FigureId::NUMERIC1;
  if (l == "numeric2") return FigureId::NUMERIC2;
  if (l == "numeric3") return FigureId::NUMERIC3;
  if (l == "numeric4") return FigureId::NUMERIC4;
  throw ConfigError("unknown figure '" + v + "'", line, "figure_id");
}

const char* to_string(SourceKind s) { return s == SourceKind::SINGLE ? "single" : "dual"; }
const char* to_string(Distribution d) { return d == Distribution::UNIFORM ? "uniform" : "gaussian"; }
const char* to_string(OutputFormat f) { return f == OutputFormat::CSV ? "csv" : "jsonl"; }
const char* to_string(EnergyAxis a) { return a == EnergyAxis::AVERAGE ? "average" : "first_round"; }

bool has_key(const std::vector<std::string>& keys, const std::string& k) {
  return std::find(keys.begin(), keys.end(), k) != keys.end();
}

// Resolved settings shared by every grid point.
struct Plan {
  ExperimentConfig cfg;
  EnergyAxis axis = EnergyAxis::AVERAGE;
  std::uint64_t trials = 0;
  bool rho_from_bits = false;
  bool optimise = true;
};

struct Point {
  int B = 0;
  std::optional<double> rho;
  double grid_value = 0.0;
  std::uint64_t index = 0;
};

double linear_energy(const Plan& p, double v) { return p.cfg.energy_linear ? v : std::pow(10.0, v / 10.0); }

double db_label(const Plan& p, double v) { return p.cfg.energy_linear ? 10.0 * std::log10(v) : v; }

std::pair<double, double> pick_lambda(const Plan& p, const std::function<double(double)>& objective) {
  if (!p.optimise) return {p.cfg.lambda.front(), objective(p.cfg.lambda.front())};
  return optimize_lambda(objective, p.cfg.lambda);
}

ResultRow base_row(const Plan& p, const Point& pt) {
  ResultRow r;
  r.mode = to_string(p.cfg.mode);
  r.B = pt.B;
  r.rho = pt.rho;
  r.alpha = p.cfg.alpha;
  r.mu = p.cfg.mu;
  r.e_over_n0_db = db_label(p, pt.grid_value);
  return r;
}

std::uint64_t point_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed ^ splitmix64(0x5eedull + index));
}

ResultRow single_awgn(const Plan& p, const Point& pt, int workers) {
  const ExperimentConfig& c = p.cfg;
  const double n0 = 1.0;
  const double E = linear_energy(p, pt.grid_value);
  const int B = pt.B;
  ResultRow r = base_row(p, pt);

  auto schedule_for = [&](double lambda) {
    const double ed1 = p.axis == EnergyAxis::AVERAGE ? solve_first_round_energy(B, E, c.mu, lambda, 0.0, n0) : E;
    return allocate_energies(2, ed1, c.mu, lambda, n0);
  };
  auto objective = [&](double lambda) {
    return std::ldexp(1.0, -2 * B) + 2.0 * total_error(B, schedule_for(lambda));
  };
  const auto [lambda, d2] = pick_lambda(p, objective);
  const EnergySchedule s = schedule_for(lambda);
  EnergySchedule one;
  one.n_rounds = 1;
  one.ed = {E};
  one.n0 = n0;

  r.lambda = lambda;
  r.bound_upper_2round = d2;
  r.bound_upper_1round = std::ldexp(1.0, -2 * B) + 2.0 * total_error(B, one);
  const double e_avg = p.axis == EnergyAxis::AVERAGE ? E : avg_energy(B, s);
  r.bound_lower = goblick_bound(e_avg, n0);
  r.avg_energy = e_avg;
  r.retx_rate = retransmission_probability(B, s);

  if (p.trials > 0) {
    TrialConfig t;
    t.source.distribution = Distribution::UNIFORM;
    t.quantizer = build_quantizer(QuantizerKind::SCALAR_UNIFORM, B);
    t.schedule = s;
    t.trials = p.trials;
    t.seed = point_seed(c.seed, pt.index);
    t.workers = workers;
    const SimStats st = run_single(t);
    r.mc_mse = st.mse;
    r.mc_stderr = st.mse_stderr;
    r.avg_energy = st.avg_energy;
    r.retx_rate = st.retransmission_rate;
  }
  return r;
}

ResultRow single_rician(const Plan& p, const Point& pt, int workers) {
  const ExperimentConfig& c = p.cfg;
  const RicianSpec spec{c.alpha, 1.0};
  const double E = linear_energy(p, pt.grid_value);
  const int B = pt.B;
  ResultRow r = base_row(p, pt);

  auto schedule_for = [&](double lambda) {
    const double ed1 =
        p.axis == EnergyAxis::AVERAGE ? solve_first_round_energy(B, E, c.mu, lambda, c.alpha, spec.n0) : E;
    return allocate_energies(2, ed1, c.mu, lambda, spec.n0);
  };
  auto objective = [&](double lambda) { return rician_distortion_two(B, schedule_for(lambda), spec); };
  const auto [lambda, d2] = pick_lambda(p, objective);
  const EnergySchedule s = schedule_for(lambda);

  r.lambda = lambda;
  r.bound_upper_2round = d2;
  r.bound_upper_1round = rician_distortion_one(B, E, spec);
  const double e_avg = p.axis == EnergyAxis::AVERAGE ? E : rician_avg_energy(B, s, spec);
  r.bound_lower = goblick_bound(e_avg, spec.n0);
  r.avg_energy = e_avg;
  const double p1 = std::min(1.0, rician_pm(std::uint64_t{1} << B, 1, s.cumulative_gamma(1), c.alpha));
  r.retx_rate = p1 * (1.0 - rician_uncorrectable(s.ec[0], s.lambda, spec)) +
                (1.0 - p1) * pr_misdetect(s.ec[0], s.n0, s.lambda);

  if (p.trials > 0) {
    TrialConfig t;
    t.source.distribution = Distribution::UNIFORM;
    t.quantizer = build_quantizer(QuantizerKind::SCALAR_UNIFORM, B);
    t.schedule = s;
    t.channel.kind = ChannelKind::RICIAN;
    t.channel.alpha = c.alpha;
    t.trials = p.trials;
    t.seed = point_seed(c.seed, pt.index);
    t.workers = workers;
    const SimStats st = run_single(t);
    r.mc_mse = st.mse;
    r.mc_stderr = st.mse_stderr;
    r.avg_energy = st.avg_energy;
    r.retx_rate = st.retransmission_rate;
  }
  return r;
}

ResultRow dual_point(const Plan& p, const Point& pt, int workers) {
  const ExperimentConfig& c = p.cfg;
  const double n0 = 1.0;
  const double E = linear_energy(p, pt.grid_value);
  const int B = pt.B;
  const double rho = *pt.rho;
  const bool uniform = c.distribution == Distribution::UNIFORM;
  ResultRow r = base_row(p, pt);

  const double theta = c.theta.value_or(uniform ? 1.0 : default_theta_gaussian(B, rho));
  CorrelationRegime regime = CorrelationRegime::HIGH;
  if (!uniform) {
    DualSchedule probe;
    probe.B = B;
    probe.rho = rho;
    probe.theta = theta;
    regime = gaussian_regime(probe);
  }
  auto energy_bound = [&](const DualSchedule& s) {
    return dual_avg_energy(s, dual_first_round_bound(s, c.distribution)).bound;
  };
  auto schedule_for = [&](double lambda) {
    double ed1 = E;
    if (p.axis == EnergyAxis::AVERAGE)
      ed1 = solve_for_average(
          [&](double x) { return energy_bound(allocate_dual(x, c.mu, lambda, regime, B, rho, theta, n0)); }, E);
    return allocate_dual(ed1, c.mu, lambda, regime, B, rho, theta, n0);
  };
  auto objective = [&](double lambda) {
    const DualSchedule s = schedule_for(lambda);
    return uniform ? dual_distortion_uniform(s) : dual_distortion_gaussian(s, regime);
  };
  const auto [lambda, d2] = pick_lambda(p, objective);
  const DualSchedule s = schedule_for(lambda);

  r.lambda = lambda;
  r.bound_upper_2round = d2;
  if (uniform) r.bound_upper_1round = dual_distortion_uniform_one_round(s);
  BoundQuery q;
  q.distribution = c.distribution;
  q.channel = ChannelModel::SUM;
  q.rho = rho;
  const double e_avg = p.axis == EnergyAxis::AVERAGE ? E : energy_bound(s);
  q.e1 = 0.5 * e_avg;
  q.e2 = 0.5 * e_avg;
  q.n0 = n0;
  r.bound_lower = regime_select(q, 2, d2).value;
  r.avg_energy = e_avg;

  if (p.trials > 0) {
    TrialConfig t;
    t.source.distribution = c.distribution;
    t.source.rho = rho;
    t.quantizer = build_quantizer(uniform ? QuantizerKind::UNIFORM_TAILS : QuantizerKind::GAUSSIAN_GRID, B, rho);
    t.schedule = s;
    t.trials = p.trials;
    t.seed = point_seed(c.seed, pt.index);
    t.workers = workers;
    const SimStats st = run_dual(t);
    r.mc_mse = st.mse;
    r.mc_stderr = st.mse_stderr;
    r.avg_energy = st.avg_energy;
    r.retx_rate = st.retransmission_rate;
  }
  return r;
}

bool row_less(const ResultRow& a, const ResultRow& b) {
  if (a.mode != b.mode) return a.mode < b.mode;
  if (a.B != b.B) return a.B < b.B;
  if (a.rho.has_value() != b.rho.has_value()) return !a.rho.has_value();
  if (a.rho && *a.rho != *b.rho) return *a.rho < *b.rho;
  return a.e_over_n0_db < b.e_over_n0_db;
}

}  // namespace

const char* to_string(Mode m) {
  switch (m) {
    case Mode::BOUNDS: return "bounds";
    case Mode::PROTOCOL: return "protocol";
    case Mode::MC: return "mc";
    default: return "figure";
  }
}

const char* to_string(FigureId f) {
  switch (f) {
    case FigureId::NUMERIC1: return "numeric1";
    case FigureId::NUMERIC2: return "numeric2";
    case FigureId::NUMERIC3: return "numeric3";
    default: return "numeric4";
  }
}

std::vector<double> default_lambda_grid() {
  std::vector<double> g;
  for (int i = 1; i <= 99; ++i) g.push_back(i / 100.0);
  return g;
}

ExperimentConfig::ExperimentConfig() : lambda(default_lambda_grid()) {
  for (int i = 0; i <= 15; ++i) energy_db.push_back(2.0 * i);
}

void ExperimentConfig::validate() const {
  if (energy_db.empty()) throw ConfigError("energy grid is empty", 0, "energy_db");
  for (double e : energy_db) {
    if (!std::isfinite(e)) throw ConfigError("energy grid must be finite", 0, "energy_db");
    if (energy_linear && !(e > 0.0)) throw ConfigError("linear energies must be positive", 0, "energy_db");
  }
  if (B.empty()) throw ConfigError("B list is empty", 0, "B");
  for (int b : B)
    if (b < 2 || b > 16) throw ConfigError("B must lie in [2, 16]", 0, "B");
  if (rho.empty()) throw ConfigError("rho list is empty", 0, "rho");
  for (double r : rho)
    if (!(std::abs(r) <= 1.0)) throw ConfigError("rho must lie in [-1, 1]", 0, "rho");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in [0, 1]", 0, "alpha");
  if (lambda.empty()) throw ConfigError("lambda grid is empty", 0, "lambda");
  for (double l : lambda)
    if (!(l >= 0.0 && l < 1.0)) throw ConfigError("lambda values must lie in [0, 1)", 0, "lambda");
  if (!(mu > 0.0 && mu < 2.0)) throw ConfigError("mu must lie in (0, 2)", 0, "mu");
  if (theta && !(*theta > 0.0)) throw ConfigError("theta must be positive", 0, "theta");
  if (threads < 0) throw ConfigError("threads must be non-negative", 0, "threads");
  if (mode == Mode::FIGURE && !figure_id) throw ConfigError("figure mode needs a figure id", 0, "figure_id");
  if (source == SourceKind::DUAL) {
    if (alpha != 0.0) throw ConfigError("dual sweeps support the AWGN channel only", 0, "alpha");
    if (distribution == Distribution::UNIFORM)
      for (double r : rho)
        if (r == 0.0) throw ConfigError("uniform dual sources need rho != 0", 0, "rho");
  } else if (distribution != Distribution::UNIFORM) {
    throw ConfigError("single-source sweeps support the uniform source only", 0, "distribution");
  }
}

ExperimentConfig parse_config(std::istream& in, ExperimentConfig base, std::vector<std::string>* keys) {
  ExperimentConfig c = std::move(base);
  std::vector<std::string> seen;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key = value", line, text);
    const std::string key = trim(text.substr(0, eq));
    const std::string val = trim(text.substr(eq + 1));
    if (key.empty()) throw ConfigError("missing key", line, "");
    if (val.empty()) throw ConfigError("missing value", line, key);
    seen.push_back(key);
    if (key == "mode") {
      c.mode = parse_mode(val, line);
    } else if (key == "figure_id") {
      c.figure_id = parse_figure(val, line);
    } else if (key == "energy_db") {
      c.energy_db = to_list(val, line, key);
    } else if (key == "energy_unit") {
      const std::string l = lower(val);
      if (l != "db" && l != "linear") throw ConfigError("energy_unit is db or linear", line, key);
      c.energy_linear = l == "linear";
    } else if (key == "B") {
      c.B.clear();
      for (double b : to_list(val, line, key)) {
        if (b != std::floor(b)) throw ConfigError("B values must be integers", line, key);
        c.B.push_back(static_cast<int>(b));
      }
    } else if (key == "rho") {
      c.rho = to_list(val, line, key);
    } else if (key == "alpha") {
      c.alpha = to_double(val, line, key);
    } else if (key == "lambda") {
      c.lambda = to_list(val, line, key);
    } else if (key == "mu") {
      c.mu = to_double(val, line, key);
    } else if (key == "trials") {
      c.trials = to_u64(val, line, key);
    } else if (key == "seed") {
      c.seed = to_u64(val, line, key);
    } else if (key == "output_path") {
      c.output_path = val;
    } else if (key == "format") {
      const std::string l = lower(val);
      if (l != "csv" && l != "jsonl") throw ConfigError("format is csv or jsonl", line, key);
      c.format = l == "csv" ? OutputFormat::CSV : OutputFormat::JSONL;
    } else if (key == "source") {
      const std::string l = lower(val);
      if (l != "single" && l != "dual") throw ConfigError("source is single or dual", line, key);
      c.source = l == "single" ? SourceKind::SINGLE : SourceKind::DUAL;
    } else if (key == "distribution") {
      const std::string l = lower(val);
      if (l != "uniform" && l != "gaussian") throw ConfigError("distribution is uniform or gaussian", line, key);
      c.distribution = l == "uniform" ? Distribution::UNIFORM : Distribution::GAUSSIAN;
    } else if (key == "theta") {
      c.theta = to_double(val, line, key);
    } else if (key == "energy_axis") {
      const std::string l = lower(val);
      if (l == "average") c.energy_axis = EnergyAxis::AVERAGE;
      else if (l == "first_round") c.energy_axis = EnergyAxis::FIRST_ROUND;
      else throw ConfigError("energy_axis is average or first_round", line, key);
    } else if (key == "threads") {
      c.threads = static_cast<int>(to_u64(val, line, key));
    } else {
      throw ConfigError("unknown key", line, key);
    }
  }
  if (keys) keys->insert(keys->end(), seen.begin(), seen.end());
  try {
    c.validate();
  } catch (const ConfigError& e) {
    if (e.field() == "figure_id" && !c.figure_id) return c;
    int at = 0;
    for (int i = static_cast<int>(seen.size()) - 1; i >= 0 && at == 0; --i)
      if (seen[i] == e.field()) at = i + 1;
    throw ConfigError(e.reason(), at, e.field());
  }
  return c;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base, std::vector<std::string>* keys) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file '" + path + "'", 0, "config");
  return parse_config(f, std::move(base), keys);
}

void apply_figure_preset(ExperimentConfig& c, const std::vector<std::string>& keys) {
  if (!c.figure_id) return;
  auto set = [&](const char* k, auto&& fn) {
    if (!has_key(keys, k)) fn();
  };
  const FigureId f = *c.figure_id;
  set("alpha", [&] { c.alpha = f == FigureId::NUMERIC3 ? 0.5 : f == FigureId::NUMERIC4 ? 0.1 : 0.0; });
  set("source", [&] { c.source = f == FigureId::NUMERIC2 ? SourceKind::DUAL : SourceKind::SINGLE; });
  set("distribution", [&] { c.distribution = Distribution::UNIFORM; });
  set("energy_unit", [&] { c.energy_linear = false; });
  set("energy_axis", [&] { c.energy_axis = EnergyAxis::AVERAGE; });
  set("B", [&] {
    if (f == FigureId::NUMERIC1) c.B = {2, 4, 6, 8};
    else c.B = {2, 4, 6};
  });
  set("energy_db", [&] {
    c.energy_db.clear();
    const int top = f == FigureId::NUMERIC1 || f == FigureId::NUMERIC2 ? 30 : 40;
    for (int e = 0; e <= top; e += 2) c.energy_db.push_back(e);
  });
  set("trials", [&] {
    if (c.trials == 0) c.trials = 2000;
  });
}

std::vector<std::pair<std::string, std::string>> config_entries(const ExperimentConfig& c) {
  std::vector<std::pair<std::string, std::string>> e;
  e.emplace_back("mode", to_string(c.mode));
  e.emplace_back("figure_id", c.figure_id ? to_string(*c.figure_id) : "none");
  e.emplace_back("source", to_string(c.source));
  e.emplace_back("distribution", to_string(c.distribution));
  e.emplace_back("energy_unit", c.energy_linear ? "linear" : "db");
  e.emplace_back("energy_axis", to_string(c.energy_axis));
  e.emplace_back("energy_db", join(c.energy_db));
  e.emplace_back("B", join(c.B));
  const bool from_bits = c.mode == Mode::FIGURE && c.figure_id == FigureId::NUMERIC2;
  e.emplace_back("rho", from_bits ? "sqrt(1-2^(-2B))" : join(c.rho));
  e.emplace_back("alpha", fmt(c.alpha));
  e.emplace_back("lambda", join(c.lambda));
  e.emplace_back("mu", fmt(c.mu));
  e.emplace_back("theta", c.theta ? fmt(*c.theta) : "default");
  e.emplace_back("trials", std::to_string(c.trials));
  e.emplace_back("seed", std::to_string(c.seed));
  e.emplace_back("format", to_string(c.format));
  return e;
}

const std::vector<std::string>& result_columns() {
  static const std::vector<std::string> cols{"mode",        "B",          "rho",
                                             "alpha",       "lambda",     "mu",
                                             "e_over_n0_db", "bound_lower", "bound_upper_1round",
                                             "bound_upper_2round", "mc_mse", "mc_stderr",
                                             "avg_energy",  "retx_rate"};
  return cols;
}

std::pair<double, double> optimize_lambda(const std::function<double(double)>& objective,
                                          const std::vector<double>& grid) {
  if (grid.empty()) throw DomainError("lambda grid is empty");
  double best_l = grid.front();
  double best_v = objective(best_l);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double v = objective(grid[i]);
    if (v < best_v) {
      best_v = v;
      best_l = grid[i];
    }
  }
  return {best_l, best_v};
}

double solve_for_average(const std::function<double(double)>& avg_of, double avg) {
  if (!(avg > 0.0) || !std::isfinite(avg)) throw DomainError("average energy must be positive");
  auto f = [&](double ed1) { return avg_of(ed1) - avg; };
  double a = avg * 1e-12, fa = f(a);
  double b = avg, fb = f(b);
  if (fb <= 0.0) return b;
  if (fa > 0.0) throw NonConvergenceError("first-round energy is not bracketed");
  // Illinois variant of regula falsi.
  int side = 0;
  for (int it = 0; it < 200; ++it) {
    const double c = (a * fb - b * fa) / (fb - fa);
    const double fc = f(c);
    if (std::abs(fc) <= 1e-12 * avg || b - a <= 1e-14 * avg) return c;
    if (fc > 0.0) {
      b = c;
      fb = fc;
      if (side == -1) fa *= 0.5;
      side = -1;
    } else {
      a = c;
      fa = fc;
      if (side == 1) fb *= 0.5;
      side = 1;
    }
  }
  throw NonConvergenceError("first-round energy did not converge");
}

double solve_first_round_energy(int B, double avg, double mu, double lambda, double alpha, double n0) {
  const RicianSpec spec{alpha, n0};
  return solve_for_average(
      [&](double ed1) {
        const EnergySchedule s = allocate_energies(2, ed1, mu, lambda, n0);
        return alpha == 0.0 ? avg_energy(B, s) : rician_avg_energy(B, s, spec);
      },
      avg);
}

double two_round_bound_at_energy(int B, double avg, double mu, double lambda, double n0) {
  const double ed1 = solve_first_round_energy(B, avg, mu, lambda, 0.0, n0);
  return std::ldexp(1.0, -2 * B) + 2.0 * total_error(B, allocate_energies(2, ed1, mu, lambda, n0));
}

double energy_for_distortion(const std::function<double(double)>& f, double target, double lo, double hi) {
  if (!(lo > 0.0 && hi > lo)) throw DomainError("energy bracket must satisfy 0 < lo < hi");
  if (f(lo) < target || f(hi) > target) throw NonConvergenceError("target distortion is not bracketed");
  double a = std::log(lo), b = std::log(hi);
  for (int it = 0; it < 200 && b - a > 1e-13; ++it) {
    const double m = 0.5 * (a + b);
    if (f(std::exp(m)) > target) a = m;
    else b = m;
  }
  return std::exp(0.5 * (a + b));
}

ResultTable run_experiment(const ExperimentConfig& cfg) {
  const ExperimentConfig& c = cfg;
  c.validate();

  Plan p;
  p.cfg = c;
  p.rho_from_bits = c.mode == Mode::FIGURE && c.figure_id == FigureId::NUMERIC2;
  p.optimise = c.mode != Mode::BOUNDS;
  if (c.mode == Mode::MC) p.trials = c.trials ? c.trials : 10000;
  else if (c.mode == Mode::FIGURE) p.trials = c.trials;
  p.axis = c.energy_axis;

  std::vector<Point> points;
  for (int B : c.B) {
    std::vector<std::optional<double>> rhos;
    if (c.source == SourceKind::SINGLE) rhos.push_back(std::nullopt);
    else if (p.rho_from_bits) rhos.push_back(std::sqrt(1.0 - std::ldexp(1.0, -2 * B)));
    else rhos.assign(c.rho.begin(), c.rho.end());
    for (const auto& rho : rhos)
      for (double e : c.energy_db) points.push_back({B, rho, e, points.size()});
  }

  int threads = c.threads > 0 ? c.threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::max(1, std::min<int>(threads, static_cast<int>(points.size())));
  const int mc_workers = points.size() == 1 ? (c.threads > 0 ? c.threads : 0) : 1;

  std::vector<ResultRow> rows(points.size());
  std::vector<std::exception_ptr> errors(points.size());
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      try {
        const Point& pt = points[i];
        if (c.source == SourceKind::DUAL) rows[i] = dual_point(p, pt, mc_workers);
        else if (c.alpha > 0.0) rows[i] = single_rician(p, pt, mc_workers);
        else rows[i] = single_awgn(p, pt, mc_workers);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::stable_sort(rows.begin(), rows.end(), row_less);
  ResultTable table;
  table.header.emplace_back("version", TWOWAY_VERSION);
  for (auto& kv : config_entries(c)) table.header.push_back(std::move(kv));
  table.header.emplace_back("trials_resolved", std::to_string(p.trials));
  table.rows = std::move(rows);
  return table;
}

}  // namespace twoway
