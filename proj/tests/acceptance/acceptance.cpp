#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "twoway/experiment.hpp"
#include "twoway/fading.hpp"
#include "twoway/lower_bounds.hpp"
#include "twoway/montecarlo.hpp"
#include "twoway/protocol_single.hpp"
#include "twoway/special_functions.hpp"

using namespace twoway;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

template <typename... Args>
std::string fmt(const char* f, Args... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, static_cast<double>(args)...);
  return buf;
}

std::string render(const ResultTable& t) {
  std::ostringstream out;
  write_table(t, OutputFormat::CSV, out);
  return out.str();
}

ExperimentConfig figure_config(FigureId id, std::uint64_t seed) {
  ExperimentConfig c;
  c.mode = Mode::FIGURE;
  c.figure_id = id;
  c.seed = seed;
  apply_figure_preset(c);
  return c;
}

// --- criteria --------------------------------------------------------------

Outcome special_function_identities() {
  Outcome o;
  double worst_a = 0, worst_b = 0, worst_p = 0;
  for (double a = 0; a <= 10; a += 0.5) worst_a = std::max(worst_a, std::abs(marcum_q1(a, 0) - 1));
  for (double b = 0; b <= 10; b += 0.5) worst_b = std::max(worst_b, std::abs(marcum_q1(0, b) - std::exp(-b * b / 2)));
  for (double g = 0; g <= 20; g += 2) worst_p = std::max(worst_p, std::abs(rician_pm(2, 1, g, 0) - 0.5 * std::exp(-g / 2)));
  o.require(worst_a <= 1e-9, fmt("Q1(a,0) off by %.3g", worst_a));
  o.require(worst_b <= 1e-9, fmt("Q1(0,b) off by %.3g", worst_b));
  o.require(worst_p <= 1e-6, fmt("binary P_M off by %.3g", worst_p));
  if (o.pass) o.detail = fmt("max errors %.2g, %.2g, %.2g", worst_a, worst_b, worst_p);
  return o;
}

Outcome pairwise_sandwich() {
  Outcome o;
  const std::uint64_t n = 1000000;
  std::string rows;
  for (int B : {2, 4})
    for (double g : {4.0, 8.0, 12.0}) {
      TrialConfig t;
      t.source.distribution = Distribution::UNIFORM;
      t.quantizer = build_quantizer(QuantizerKind::SCALAR_UNIFORM, B);
      EnergySchedule s;
      s.ed = {g};
      t.schedule = s;
      t.trials = n;
      t.seed = 1000 + static_cast<std::uint64_t>(B * 100 + g);
      t.workers = 0;
      const double mc = run_single(t).per_round_error_rate[0];
      const double sigma = std::sqrt(mc * (1 - mc) / static_cast<double>(n));
      const double ub = pr_round_error(B, g, 1);
      const double ex = pr_round_error_exact(B, g, 1);
      o.require(mc <= ub + 3 * sigma, fmt("B=%g g=%g: MC %.4g above union %.4g", B, g, mc, ub));
      o.require(mc >= ex - 3 * sigma, fmt("B=%g g=%g: MC %.4g below exact %.4g", B, g, mc, ex));
      rows += fmt(" [B=%g g=%g %.3e<=%.3e]", B, g, mc, ub);
    }
  if (o.pass) o.detail = "MC within [exact, union] at 3 sigma:" + rows;
  return o;
}

Outcome energy_accounting() {
  Outcome o;
  std::string rows;
  for (double e : {8.0, 12.0, 16.0}) {
    const auto s = allocate_energies(2, e, 1.0, 0.25);
    TrialConfig t;
    t.source.distribution = Distribution::UNIFORM;
    t.quantizer = build_quantizer(QuantizerKind::SCALAR_UNIFORM, 4);
    t.schedule = s;
    t.trials = 100000;
    t.seed = 77 + static_cast<std::uint64_t>(e);
    t.workers = 0;
    const auto st = run_single(t);
    const double cf = avg_energy(4, s);
    const double z = (st.avg_energy - cf) / st.energy_stderr;
    o.require(std::abs(z) < 3, fmt("E_D1=%g: MC %.5g vs %.5g (z=%.2f)", e, st.avg_energy, cf, z));
    rows += fmt(" [E_D1=%g z=%.2f]", e, z);
  }
  const double rel = avg_energy(4, allocate_energies(2, 25.0, 1.0, 0.25)) / 25.0 - 1.0;
  o.require(rel < 0.01, fmt("average energy at E_D1=25 exceeds E_D1 by %.3g", rel));
  if (o.pass) o.detail = "MC vs closed form:" + rows + fmt(", excess at 25: %.2e", rel);
  return o;
}

Outcome two_round_exponent() {
  Outcome o;
  std::vector<double> x;
  for (double e = 30; e <= 60; e += 1) x.push_back(e);
  auto slope = [&](int rounds, double mu) {
    std::vector<double> y;
    for (double e : x) y.push_back(std::log(distortion_upper(6, allocate_energies(rounds, e, mu, 0.25), true).distortion));
    return fitted_slope(x, y);
  };
  std::string rows;
  for (double mu : {0.5, 1.0}) {
    const double got = slope(2, mu);
    const double want = -(1 + mu / 3);
    o.require(std::abs(got / want - 1) <= 0.05,
              fmt("2 rounds mu=%g: slope %.4f, expected %.4f (schedule exponent gives %.4f)", mu, got, want,
                  -asymptotic_exponent(allocate_energies(2, 30, mu, 0.25))));
    rows += fmt(" [2 rounds mu=%g %.4f]", mu, got);
  }
  for (double mu : {0.25, 0.5}) {
    const double got = slope(3, mu);
    const double want = -(1 - 2 * mu / 3);
    o.require(std::abs(got / want - 1) <= 0.05, fmt("3 rounds mu=%g: slope %.4f, expected %.4f", mu, got, want));
    rows += fmt(" [3 rounds mu=%g %.4f vs %.4f]", mu, got, want);
  }
  if (o.pass) o.detail = "slopes" + rows;
  return o;
}

Outcome feedback_gain() {
  Outcome o;
  const int B = 6;
  const double target = 1e-3;
  const auto grid = default_lambda_grid();
  auto one = [&](double e) {
    EnergySchedule s;
    s.ed = {e};
    return distortion_upper(B, s).distortion;
  };
  auto two = [&](double e) {
    return optimize_lambda([&](double l) { return two_round_bound_at_energy(B, e, 1.0, l); }, grid).second;
  };
  const double e1 = energy_for_distortion(one, target, 1.0, 1e4);
  const double e2 = energy_for_distortion(two, target, 1.0, 1e4);
  const double gain = 10 * std::log10(e1 / e2);
  o.require(gain >= 2.0 && gain <= 4.0, fmt("gain %.3f dB outside 3 +- 1 dB", gain));
  o.detail = fmt("one round %.3f dB, two rounds %.3f dB, gain %.3f dB", 10 * std::log10(e1), 10 * std::log10(e2), gain);
  return o;
}

Outcome sandwich() {
  Outcome o;
  std::string rows;

  ExperimentConfig c;
  c.mode = Mode::MC;
  c.energy_db = {10, 15, 20};
  c.B = {4, 6};
  c.trials = 100000;
  c.seed = 2024;
  const auto single = run_experiment(c);
  for (const auto& r : single.rows) {
    const double e = std::pow(10.0, r.e_over_n0_db / 10);
    const double lo = goblick_bound(e, 1.0);
    const double sig = *r.mc_stderr;
    o.require(*r.mc_mse >= lo - 3 * sig, fmt("single B=%g %g dB: MC %.4g below %.4g", r.B, r.e_over_n0_db, *r.mc_mse, lo));
    o.require(*r.mc_mse <= *r.bound_upper_2round + 3 * sig,
              fmt("single B=%g %g dB: MC %.4g above %.4g", r.B, r.e_over_n0_db, *r.mc_mse, *r.bound_upper_2round));
    rows += fmt(" [single B=%g %gdB %.3e<=%.3e]", r.B, r.e_over_n0_db, *r.mc_mse, *r.bound_upper_2round);
  }

  c.source = SourceKind::DUAL;
  c.rho = {0.99};
  const auto dual = run_experiment(c);
  for (const auto& r : dual.rows) {
    const double sig = *r.mc_stderr;
    o.require(*r.mc_mse >= *r.bound_lower - 3 * sig,
              fmt("dual B=%g %g dB: MC %.4g below %.4g", r.B, r.e_over_n0_db, *r.mc_mse, *r.bound_lower));
    o.require(*r.mc_mse <= *r.bound_upper_2round + 3 * sig,
              fmt("dual B=%g %g dB: MC %.4g above %.4g", r.B, r.e_over_n0_db, *r.mc_mse, *r.bound_upper_2round));
    rows += fmt(" [dual B=%g %gdB %.3e in [%.3e, %.3e]]", r.B, r.e_over_n0_db, *r.mc_mse, *r.bound_lower,
               *r.bound_upper_2round);
  }
  if (o.pass) o.detail = "all points inside the bounds:" + rows;
  return o;
}

Outcome lower_bound_constants() {
  Outcome o;
  const double pe = std::numbers::pi * std::numbers::e;
  BoundQuery q;
  q.distribution = Distribution::UNIFORM;
  const double d = std::abs(single_split_bound(q).value - 6 / pe);
  o.require(d <= 1e-12, fmt("single constant off by %.3g", d));
  double worst = 0;
  for (double rho : {0.0, 0.5, 0.9, 0.99}) {
    q.rho = rho;
    worst = std::max(worst, std::abs(dual_bound(q, 1, Regime::LOW).value - 36 * (1 - rho * rho) / (pe * pe)));
  }
  o.require(worst <= 1e-12, fmt("low-correlation constant off by %.3g", worst));
  if (o.pass) o.detail = fmt("errors %.2g and %.2g", d, worst);
  return o;
}

Outcome rician_continuity() {
  Outcome o;
  double worst_u = 0, worst_p = 0;
  for (double ec : {0.5, 2.0, 8.0, 32.0})
    for (double lam : {0.1, 0.25, 0.5, 0.9})
      worst_u = std::max(worst_u, std::abs(rician_uncorrectable(ec, lam, {1e-6, 1.0}) - pr_uncorrectable(ec, 1.0, lam, true)));
  for (std::uint64_t M : {2u, 4u, 16u, 64u})
    for (int L : {1, 2})
      for (double g : {0.0, 2.0, 8.0, 20.0, 40.0})
        worst_p = std::max(worst_p, std::abs(rician_pm(M, L, g, 1e-6) - rician_pm(M, L, g, 0.0)));
  o.require(worst_u <= 1e-4, fmt("uncorrectable probability moved by %.3g", worst_u));
  o.require(worst_p <= 1e-4, fmt("P_M moved by %.3g", worst_p));

  int checked = 0;
  for (FigureId id : {FigureId::NUMERIC4, FigureId::NUMERIC3}) {
    const auto t = run_experiment(figure_config(id, 1));
    for (const auto& r : t.rows) {
      if (r.e_over_n0_db < 20) continue;
      ++checked;
      o.require(*r.bound_upper_2round < *r.bound_upper_1round,
                fmt("alpha=%g B=%g %g dB: two rounds %.5g not below one round", r.alpha, r.B, r.e_over_n0_db,
                    *r.bound_upper_2round));
    }
  }
  if (o.pass)
    o.detail = fmt("max deviations %.2g, %.2g; two rounds below one round at %g points", worst_u, worst_p, checked);
  return o;
}

Outcome reproducibility(const char* cli) {
  Outcome o;
  for (FigureId id : {FigureId::NUMERIC1, FigureId::NUMERIC2, FigureId::NUMERIC3, FigureId::NUMERIC4}) {
    const std::string a = render(run_experiment(figure_config(id, 42)));
    const std::string b = render(run_experiment(figure_config(id, 42)));
    o.require(a == b, std::string("in-process ") + to_string(id) + " differs between runs");
  }
  std::string extra;
  if (cli) {
    for (const char* id : {"NUMERIC1", "NUMERIC3"}) {
      std::string files[2];
      for (int k = 0; k < 2; ++k) {
        const std::string path = std::string("acceptance_") + id + "_" + std::to_string(k) + ".csv";
        const std::string cmd = std::string(cli) + " figure --id " + id + " --seed 42 --out " + path;
        o.require(std::system(cmd.c_str()) == 0, "command failed: " + cmd);
        std::ifstream in(path, std::ios::binary);
        files[k].assign(std::istreambuf_iterator<char>(in), {});
        std::remove(path.c_str());
      }
      o.require(!files[0].empty() && files[0] == files[1], std::string("CLI output of ") + id + " differs between runs");
    }
    extra = " and CLI runs";
  }
  if (o.pass) o.detail = "figure tables byte-identical across in-process" + extra;
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const char* cli = argc > 1 ? argv[1] : nullptr;
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "special-function identities", 5, special_function_identities},
      {2, "pairwise-bound sandwich", 120, pairwise_sandwich},
      {3, "energy accounting", 0, energy_accounting},
      {4, "two-round exponent", 10, two_round_exponent},
      {5, "feedback gain", 0, feedback_gain},
      {6, "sandwich property", 600, sandwich},
      {7, "lower-bound constants", 0, lower_bound_constants},
      {8, "rician continuity and diversity", 0, rician_continuity},
      {9, "reproducibility", 0, [cli] { return reproducibility(cli); }},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget_s > 0 && secs > c.budget_s) o.require(false, fmt("took %.1f s, budget %.0f s", secs, c.budget_s));
    std::printf("%s criterion %d (%s): %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
