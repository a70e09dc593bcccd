#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "twoway/errors.hpp"
#include "twoway/experiment.hpp"

namespace {

constexpr const char* kDefaults =
    "\nDefaults: energy grid 0:30:2 dB, lambda grid 0.01:0.99:0.01 (99 points), mu = 1,\n"
    "B = 4, rho = 0.99, seed = 1, trials = 10000 for mc and 2000 for figure.\n"
    "Config files hold `key = value` lines with keys mode, figure_id, energy_db,\n"
    "energy_unit, energy_axis, B, rho, alpha, lambda, mu, theta, trials, seed,\n"
    "source, distribution, format, output_path, threads.\n"
    "Exit codes: 0 success, 2 configuration error, 3 numeric non-convergence.\n";

struct Options {
  std::string config;
  std::string out;
  std::string format;
  std::string figure;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> trials;
  std::optional<int> threads;
};

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config, "Config file (flat key = value)")->check(CLI::ExistingFile);
  sub->add_option("--out", o.out, "Output path (default: stdout)");
  sub->add_option("--seed", o.seed, "Random seed");
  sub->add_option("--trials", o.trials, "Monte Carlo trials per grid point");
  sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "jsonl"}));
  sub->add_option("--threads", o.threads, "Worker threads (0: all cores)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distortion bounds and simulation of a two-way feedback protocol for analog sources"};
  app.footer(kDefaults);
  app.require_subcommand(1);
  Options o;
  auto* bounds = app.add_subcommand("bounds", "Lower and upper bounds at the first lambda of the grid");
  auto* protocol = app.add_subcommand("protocol", "Protocol bounds with lambda optimised per grid point");
  auto* mc = app.add_subcommand("mc", "Protocol bounds plus Monte Carlo simulation");
  auto* figure = app.add_subcommand("figure", "Preset sweeps NUMERIC1..NUMERIC4");
  for (auto* s : {bounds, protocol, mc, figure}) add_common(s, o);
  figure->add_option("--id", o.figure, "Figure preset")
      ->check(CLI::IsMember({"NUMERIC1", "NUMERIC2", "NUMERIC3", "NUMERIC4"}, CLI::ignore_case));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  using twoway::Mode;
  Mode mode = Mode::BOUNDS;
  if (protocol->parsed()) mode = Mode::PROTOCOL;
  if (mc->parsed()) mode = Mode::MC;
  if (figure->parsed()) mode = Mode::FIGURE;

  try {
    twoway::ExperimentConfig cfg;
    std::vector<std::string> keys;
    if (!o.config.empty()) cfg = twoway::load_config(o.config, cfg, &keys);
    cfg.mode = mode;
    if (o.seed) {
      cfg.seed = *o.seed;
      keys.emplace_back("seed");
    }
    if (o.trials) {
      cfg.trials = *o.trials;
      keys.emplace_back("trials");
    }
    if (o.threads) cfg.threads = *o.threads;
    if (!o.format.empty()) cfg.format = o.format == "csv" ? twoway::OutputFormat::CSV : twoway::OutputFormat::JSONL;
    if (!o.out.empty()) cfg.output_path = o.out;
    if (mode == Mode::FIGURE) {
      if (!o.figure.empty()) {
        std::istringstream line("figure_id = " + o.figure);
        cfg.figure_id = twoway::parse_config(line).figure_id;
      }
      if (!cfg.figure_id) throw twoway::ConfigError("figure needs --id or a figure_id key", 0, "figure_id");
      twoway::apply_figure_preset(cfg, keys);
    }

    const twoway::ResultTable table = twoway::run_experiment(cfg);
    std::ostringstream text;
    twoway::write_table(table, cfg.format, text);
    if (cfg.output_path.empty()) {
      std::cout << text.str();
    } else {
      std::ofstream f(cfg.output_path, std::ios::binary);
      if (!f) {
        std::cerr << "error: cannot write '" << cfg.output_path << "'\n";
        return 1;
      }
      f << text.str();
    }
  } catch (const twoway::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const twoway::NonConvergenceError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
