#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "entest/approx.hpp"
#include "entest/bounds.hpp"
#include "entest/estimators.hpp"
#include "entest/harness.hpp"
#include "entest/io.hpp"

namespace {

using namespace entest;

std::string num12(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%#.12g", v);
  return buf;
}

std::string num17(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_file_atomic(out_path, text);
  }
}

struct EstimateArgs {
  std::string input;
  std::string estimator = "jvhw";
  double c1 = EstimatorConfig{}.c1;
  double c2 = EstimatorConfig{}.c2;
  bool no_clamp = false;
  bool per_bin = false;
  bool bits = false;
  std::uint64_t seed = 0;
  std::string out;
};

int run_estimate(const EstimateArgs& a) {
  const Histogram h = read_histogram_file(a.input);
  const EstimatorId id = parse_estimator(a.estimator);
  const double scale = a.bits ? 1.0 / std::numbers::ln2 : 1.0;
  EstimatorConfig cfg;
  cfg.c1 = a.c1;
  cfg.c2 = a.c2;
  cfg.clamp_output = !a.no_clamp;
  cfg.seed = a.seed;

  double value = 0.0;
  std::vector<double> contrib;
  std::vector<std::string> regimes;
  if (id == EstimatorId::Jvhw) {
    const SplitPair pair = split_counts(h, a.seed);
    if (pair.model_mismatch) std::cerr << "warning: splitting a multinomial histogram (halves are not independent)\n";
    const EstimateResult r = jvhw_estimate(pair, cfg, a.per_bin);
    value = r.value;
    if (a.per_bin) {
      contrib = *r.per_bin;
      for (Regime g : *r.regime) regimes.emplace_back(g == Regime::Smooth ? "smooth" : "nonsmooth");
    }
  } else {
    value = id == EstimatorId::Mle ? mle_entropy(h) : corrected_mle(h);
    if (a.per_bin) {
      contrib = mle_per_bin(h, id == EstimatorId::Corrected);
      regimes.assign(contrib.size(), "plugin");
    }
  }

  std::ostringstream out;
  if (a.per_bin) {
    out << "bin,regime,contribution\n";
    for (std::size_t i = 0; i < contrib.size(); ++i) out << i << ',' << regimes[i] << ',' << num17(contrib[i] * scale) << '\n';
    out << "total,," << num12(value * scale) << '\n';
  } else {
    out << num12(value * scale) << '\n';
  }
  emit(out.str(), a.out);
  return 0;
}

struct SimulateArgs {
  std::string config;
  std::string out;
  bool resume = false;
  int threads = 0;
  std::optional<std::uint64_t> seed;
};

int run_simulate(const SimulateArgs& a) {
  std::istringstream text(read_text_file(a.config));
  SweepConfig cfg = parse_sweep_config(text);
  if (a.seed) cfg.seed = *a.seed;
  std::map<std::string, std::string> done;
  if (a.resume) {
    if (a.out.empty()) throw CLI::ValidationError("--resume", "requires --out");
    std::ifstream prev(a.out);
    if (prev) done = read_sweep_rows(prev);
  }
  std::ostringstream out;
  sweep(cfg, out, done, a.threads);
  emit(out.str(), a.out);
  return 0;
}

struct ApproxArgs {
  int K = 0;
  bool dump = false;
  std::string function = "xlogx";
  double eta = 1e-3;
  std::string out;
};

int run_approx(const ApproxArgs& a) {
  if (a.K < 0) throw std::invalid_argument("--K must be >= 0");
  ApproxPoly poly;
  if (a.function == "xlogx") {
    poly = entropy_coeffs(std::max(a.K, 1));
    if (a.K == 0) poly = remez_best_approx(neg_x_log_x, 0, {0.0, 1.0});
  } else if (a.function == "neglog") {
    if (!(a.eta > 0.0 && a.eta < 1.0)) throw std::invalid_argument("--eta must lie in (0,1)");
    poly = remez_best_approx([](double x) { return -std::log(x); }, a.K, {a.eta, 1.0});
  } else {
    throw std::invalid_argument("--function must be xlogx or neglog");
  }
  std::ostringstream out;
  if (a.dump) {
    out << "k,coeff\n";
    for (std::size_t k = 0; k < poly.coeffs.size(); ++k) out << k << ',' << num17(poly.coeffs[k]) << '\n';
  } else {
    out << "degree,lo,hi,sup_error,iterations\n"
        << poly.degree << ',' << num17(poly.interval.lo) << ',' << num17(poly.interval.hi) << ','
        << num17(poly.sup_error) << ',' << poly.iterations << '\n';
  }
  emit(out.str(), a.out);
  return 0;
}

struct BoundsArgs {
  double S = 0.0;
  double n = 0.0;
  double H = 0.0;
  std::string which = "both";
  bool bits = false;
};

int run_bounds(const BoundsArgs& a) {
  std::ostringstream out;
  const auto line = [&](const RateValue& r) { return std::string(to_string(r.regime)) + ',' + num17(r.value); };
  if (a.which == "mle") {
    out << line(rate_mle(a.S, a.n, a.H)) << '\n';
  } else if (a.which == "minimax") {
    out << line(rate_minimax(a.S, a.n, a.H)) << '\n';
  } else if (a.which == "both") {
    out << "mle," << line(rate_mle(a.S, a.n, a.H)) << '\n';
    out << "minimax," << line(rate_minimax(a.S, a.n, a.H)) << '\n';
  } else {
    throw std::invalid_argument("--which must be mle, minimax or both");
  }
  std::cout << out.str();
  return 0;
}

struct PriorsArgs {
  int L = 5;
  double eta = 1e-3;
  int grid_size = 0;
  std::string out;
};

int run_priors(const PriorsArgs& a) {
  const int grid = a.grid_size > 0 ? a.grid_size : std::max(2000, 10 * (a.L + 2));
  const MatchedPair pair = moment_matched_measures(a.L, a.eta, grid);
  std::map<double, std::pair<double, double>> rows;
  for (std::size_t i = 0; i < pair.nu0.atoms.size(); ++i) rows[pair.nu0.atoms[i]].first = pair.nu0.weights[i];
  for (std::size_t i = 0; i < pair.nu1.atoms.size(); ++i) rows[pair.nu1.atoms[i]].second = pair.nu1.weights[i];
  std::ostringstream out;
  out << "atom,weight0,weight1\n";
  for (const auto& [atom, w] : rows) out << num17(atom) << ',' << num17(w.first) << ',' << num17(w.second) << '\n';
  emit(out.str(), a.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entropy estimation toolkit: estimators, risk simulation, approximation and bounds"};
  app.require_subcommand(1);

  EstimateArgs est;
  auto* c_est = app.add_subcommand("estimate", "Estimate entropy (nats) from a histogram file");
  c_est->add_option("input", est.input, "Histogram file: one count per line, optional '# n=<int> model=<m>' header")
      ->required();
  c_est->add_option("--estimator", est.estimator, "mle, corrected or jvhw")
      ->check(CLI::IsMember({"mle", "corrected", "jvhw"}))
      ->capture_default_str();
  c_est->add_option("--c1", est.c1, "Threshold constant: Delta = c1 ln m / m")->capture_default_str();
  c_est->add_option("--c2", est.c2, "Degree constant: K = round(c2 ln m)")->capture_default_str();
  c_est->add_flag("--no-clamp", est.no_clamp, "Do not clamp the jvhw estimate to [0, ln S]");
  c_est->add_flag("--per-bin", est.per_bin, "Print per-bin contributions as CSV bin,regime,contribution");
  c_est->add_option("--seed", est.seed, "Seed for the binomial split")->capture_default_str();
  c_est->add_flag("--bits", est.bits, "Report in bits instead of nats");
  c_est->add_option("--out", est.out, "Write output to this path (atomic) instead of stdout");

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "Run a Monte Carlo risk sweep and emit CSV");
  c_sim->add_option("--config", sim.config, "Sweep config (key = value lines)")->required();
  c_sim->add_option("--out", sim.out, "Output CSV path (atomic)");
  c_sim->add_flag("--resume", sim.resume, "Keep rows already present in --out and compute the rest");
  c_sim->add_option("--threads", sim.threads, "Harness threads (0 = runtime default)")->check(CLI::NonNegativeNumber);
  c_sim->add_option("--seed", sim.seed, "Override the config seed");

  ApproxArgs apx;
  auto* c_apx = app.add_subcommand("approx", "Best uniform polynomial approximation");
  c_apx->add_option("--K", apx.K, "Polynomial degree")->capture_default_str();
  c_apx->add_flag("--dump", apx.dump, "Dump monomial coefficients as CSV k,coeff");
  c_apx->add_option("--function", apx.function, "xlogx (-x ln x on [0,1]) or neglog (-ln x on [eta,1])")
      ->check(CLI::IsMember({"xlogx", "neglog"}))
      ->capture_default_str();
  c_apx->add_option("--eta", apx.eta, "Left endpoint for neglog")->capture_default_str();
  c_apx->add_option("--out", apx.out, "Write output to this path (atomic) instead of stdout");

  BoundsArgs bnd;
  auto* c_bnd = app.add_subcommand("bounds", "Evaluate risk-rate shapes");
  c_bnd->add_option("--S", bnd.S, "Alphabet size")->required();
  c_bnd->add_option("--n", bnd.n, "Sample size")->required();
  c_bnd->add_option("--H", bnd.H, "Entropy upper bound (nats)")->required();
  c_bnd->add_option("--which", bnd.which, "mle, minimax or both")
      ->check(CLI::IsMember({"mle", "minimax", "both"}))
      ->capture_default_str();

  PriorsArgs pri;
  auto* c_pri = app.add_subcommand("priors", "Moment-matched measure pair as CSV atom,weight0,weight1");
  c_pri->add_option("--L", pri.L, "Number of matched moments")->capture_default_str();
  c_pri->add_option("--eta", pri.eta, "Support left endpoint")->capture_default_str();
  c_pri->add_option("--grid-size", pri.grid_size, "Fallback grid size (0 = max(2000, 10 (L+2)))")
      ->capture_default_str();
  c_pri->add_option("--out", pri.out, "Write output to this path (atomic) instead of stdout");

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

  try {
    if (*c_est) return run_estimate(est);
    if (*c_sim) return run_simulate(sim);
    if (*c_apx) return run_approx(apx);
    if (*c_bnd) return run_bounds(bnd);
    if (*c_pri) return run_priors(pri);
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
