// Acceptance gate: one [PASS]/[FAIL] line per criterion. `--only N` runs a
// single criterion; the exit status is nonzero when any selected one fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "entest/approx.hpp"
#include "entest/bounds.hpp"
#include "entest/estimators.hpp"
#include "entest/harness.hpp"
#include "entest/model.hpp"

using namespace entest;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Seconds {
 public:
  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Outcome remez_constant() {
  Seconds clock;
  Outcome o;
  double prev = 0.0;
  for (int K : {20, 30, 40}) {
    const double v = K * K * remez_best_approx(neg_x_log_x, K, {0.0, 1.0}).sup_error;
    o.detail += "K=" + std::to_string(K) + ":" + fmt("%.5f", v) + " ";
    if (v < 0.30 || v > 0.60) o.pass = false;
    if (prev > 0.0 && std::abs(v - prev) / prev >= 0.2) o.pass = false;
    prev = v;
  }
  const double t = clock.elapsed();
  o.detail += "band [0.30,0.60] time " + fmt("%.2fs", t);
  if (t >= 10.0) o.pass = false;
  return o;
}

Outcome equioscillation() {
  Outcome o;
  int worst_margin = 1 << 30;
  for (int K = 0; K <= 40; ++K) {
    const ApproxPoly p = K == 0 ? remez_best_approx(neg_x_log_x, 0, {0.0, 1.0}) : entropy_coeffs(K);
    const int alt = count_alternations(neg_x_log_x, p, certification_grid(p));
    worst_margin = std::min(worst_margin, alt - (K + 2));
    if (alt < K + 2) {
      o.pass = false;
      o.detail += "K=" + std::to_string(K) + " has " + std::to_string(alt) + " ";
    }
  }
  o.detail += "min(alternations - (K+2)) = " + std::to_string(worst_margin);
  return o;
}

Outcome factorial_moments() {
  Outcome o;
  const double n = 1000.0;
  double worst = 0.0;
  for (double p : {1e-4, 1e-3, 1e-2}) {
    const double lambda = n * p;
    for (int k = 1; k <= 8; ++k) {
      ShiftedCoeffs g;
      g.delta = 0.25;
      g.g.assign(static_cast<std::size_t>(k), 0.0L);
      g.g.back() = 1.0L;
      long double mass = 0.0L;
      long double acc = 0.0L;
      long double logw = -lambda;
      for (int c = 0;; ++c) {
        if (c > 0) logw += std::log(static_cast<long double>(lambda) / c);
        const long double w = std::exp(logw);
        mass += w;
        const long double term = w * s_kh(c / n, g, n);
        acc += term;
        if (c > lambda + 1 && 1.0L - mass < 1e-12L && acc != 0.0L && std::abs(term) <= 1e-22L * std::abs(acc)) break;
      }
      const double rel = std::abs(static_cast<double>(acc) - std::pow(p, k)) / std::pow(p, k);
      worst = std::max(worst, rel);
    }
  }
  o.pass = worst <= 1e-9;
  o.detail = "max relative error " + fmt("%.3g", worst) + " (tol 1e-9)";
  return o;
}

Outcome plugin_bias_bounds() {
  Seconds clock;
  Outcome o;
  int checked = 0;
  int violations = 0;
  const double e = std::numbers::e;
  for (int n : {5, 10, 20, 35, 50}) {
    for (int c : {1, 2, 3, 4, 6}) {
      for (double f : {1e-4, 1e-3, 0.01, 0.05, 0.1, 0.2, 0.4, 0.6, 0.8, 1.0}) {
        const double p = f * c / (2.0 * e * n);
        const double b = exact_plugin_bias(p, n, CountModel::Binomial);
        double upper = -p * std::log(n * p) + p * std::log(c) + c * std::log(c) / n * std::pow(e * n * p / c, c);
        for (int k = c + 1; k <= n; ++k) upper += (std::log(k) + 1.0) / n * std::pow(e * n * p / k, k);
        violations += (b < 0.0) + (b > upper) + (b < -p * std::log(n * p));
        checked += 3;
      }
    }
    // The lower bound holds for every p.
    for (double p : {0.05, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99}) {
      violations += exact_plugin_bias(p, n, CountModel::Binomial) < -p * std::log(n * p);
      ++checked;
    }
  }
  const double t = clock.elapsed();
  o.pass = violations == 0 && t < 5.0;
  o.detail = std::to_string(checked) + " inequalities, " + std::to_string(violations) + " violated, time " + fmt("%.2fs", t);
  return o;
}

Outcome mle_global_bias() {
  Outcome o;
  Rng rng(20240601);
  int violations = 0;
  int cases = 0;
  double tightest = 1e300;
  for (int S : {2, 3}) {
    for (int n = 1; n <= 6; ++n) {
      for (int r = 0; r < 50; ++r) {
        const auto p = random_distribution(static_cast<std::size_t>(S), rng);
        const double gap = entropy(p) - exact_multinomial_moments(EstimatorId::Mle, p, n).mean;
        const double bound = std::log(1.0 + (S - 1.0) / n);
        violations += gap < -1e-12 || gap > bound + 1e-12;
        tightest = std::min(tightest, bound - gap);
        ++cases;
      }
    }
  }
  o.pass = violations == 0;
  o.detail = std::to_string(cases) + " distributions, " + std::to_string(violations) + " violations, min slack " +
             fmt("%.3g", tightest);
  return o;
}

Outcome squared_log_moment() {
  Outcome o;
  Rng rng(77);
  int violations = 0;
  double max_ratio = 0.0;
  for (int S : {2, 10, 100, 1000}) {
    const double lnS = std::log(static_cast<double>(S));
    for (int r = 0; r < 1000; ++r) {
      const auto p = random_distribution(static_cast<std::size_t>(S), rng);
      double lhs = 0.0;
      for (double q : p.probs()) {
        if (q > 0.0) lhs += q * std::log(q) * std::log(q);
      }
      const double rhs = 2.0 * lnS * entropy(p) + 3.0;
      violations += lhs > rhs;
      max_ratio = std::max(max_ratio, lhs / rhs);
    }
  }
  o.pass = violations == 0;
  o.detail = "4000 draws, " + std::to_string(violations) + " violations, max lhs/rhs " + fmt("%.4f", max_ratio);
  return o;
}

RiskReport risk(EstimatorId id, std::int64_t S, std::int64_t n, std::int64_t trials, std::uint64_t seed) {
  return mc_risk(make_family({family::Uniform{S}, {}}), {id, n, trials, SamplingModel::Poissonized, seed, {}, "uniform"});
}

Outcome dominance() {
  Seconds clock;
  const RiskReport j = risk(EstimatorId::Jvhw, 5000, 1000, 200, 1);
  const RiskReport m = risk(EstimatorId::Mle, 5000, 1000, 200, 1);
  const double t = clock.elapsed();
  Outcome o;
  o.pass = j.mse <= 0.5 * m.mse && t < 60.0;
  o.detail = "mse jvhw " + fmt("%.5g", j.mse) + " vs mle " + fmt("%.5g", m.mse) + " (ratio " + fmt("%.4f", j.mse / m.mse) +
             ", need <= 0.5), time " + fmt("%.2fs", t);
  return o;
}

Outcome enlargement() {
  const std::int64_t big = std::lround(1000.0 * std::log(1000.0));
  const RiskReport j = risk(EstimatorId::Jvhw, 5000, 1000, 200, 2);
  const RiskReport m = risk(EstimatorId::Mle, 5000, big, 200, 3);
  const double ratio = j.mse / m.mse;
  Outcome o;
  o.pass = ratio >= 0.1 && ratio <= 3.0;
  o.detail = "mse jvhw(n=1000) / mle(n=" + std::to_string(big) + ") = " + fmt("%.4f", ratio) + " (band [0.1,3])";
  return o;
}

Outcome bias_shape() {
  Outcome o;
  std::vector<double> b2;
  for (std::int64_t n : {500, 1000, 2000}) {
    const RiskReport r = risk(EstimatorId::Mle, 2000, n, 400, 4 + static_cast<std::uint64_t>(n));
    b2.push_back(r.bias * r.bias);
  }
  const double r1 = b2[0] / b2[1];
  const double r2 = b2[1] / b2[2];
  o.pass = r1 >= 2.5 && r1 <= 6.0 && r2 >= 2.5 && r2 <= 6.0;
  o.detail = "bias^2 ratios 500/1000 " + fmt("%.4f", r1) + ", 1000/2000 " + fmt("%.4f", r2) + " (band [2.5,6])";
  return o;
}

Outcome lower_bound_sanity() {
  Outcome o;
  const struct {
    std::int64_t S;
    double H;
    std::int64_t n;
  } cases[] = {{50, 2.0, 400}, {200, 3.0, 1000}, {1000, 5.0, 2000}};
  double worst = 0.0;
  for (const auto& c : cases) {
    const auto [t0, t1] = two_point_variance_pair(c.S, c.H, static_cast<double>(c.n));
    const double lb = lecam_two_point(t0, t1, static_cast<double>(c.n), entropy(t0), entropy(t1));
    for (auto id : {EstimatorId::Mle, EstimatorId::Jvhw}) {
      for (const auto* theta : {&t0, &t1}) {
        const RiskReport r = mc_risk(*theta, {id, c.n, 400, SamplingModel::Poissonized, 5, {}, "twopoint"});
        const double cap = r.mse + 3.0 * r.stderr_mse;
        worst = std::max(worst, lb / cap);
        if (lb > cap) o.pass = false;
      }
    }
  }
  o.detail = "max lower-bound / (mse + 3 se) = " + fmt("%.4f", worst) + " over 3 pairs x 2 estimators x 2 points";
  return o;
}

Outcome moment_matching() {
  Outcome o;
  for (auto [L, eta] : {std::pair{3, 0.05}, {5, 0.001}}) {
    const MatchedPair p = moment_matched_measures(L, eta, 4000);
    double mism = 0.0;
    for (int l = 0; l <= L; ++l) mism = std::max(mism, std::abs(p.nu1.moment(l) - p.nu0.moment(l)));
    const double gap_err = std::abs(p.log_gap - 2.0 * log_approx_error(L, eta));
    const DiscreteMeasure a = tilt_measure(p.nu0, eta);
    const DiscreteMeasure b = tilt_measure(p.nu1, eta);
    double tilt_mism = 0.0;
    for (int l = 1; l <= L + 1; ++l) tilt_mism = std::max(tilt_mism, std::abs(a.moment(l) - b.moment(l)));
    const double first = std::max(std::abs(a.moment(1) - eta), std::abs(b.moment(1) - eta));
    if (mism >= 1e-8 || gap_err >= 1e-6 || tilt_mism >= 1e-8 || first >= 1e-8) o.pass = false;
    o.detail += "(L=" + std::to_string(L) + ") moments " + fmt("%.2g", mism) + " gap " + fmt("%.2g", gap_err) + " tilted " +
                fmt("%.2g", tilt_mism) + " first " + fmt("%.2g", first) + "; ";
  }
  return o;
}

Outcome indicator_smoothness() {
  Outcome o;
  const double t = 0.01;
  const double h = 1e-5;
  double worst = 0.0;
  int worst_order = 0;
  for (double seam : {t, 2.0 * t}) {
    for (int order = 1; order <= 4; ++order) {
      double s = 0.0;
      double binom = 1.0;
      for (int j = 0; j <= order; ++j) {
        if (j > 0) binom = binom * (order - j + 1) / j;
        s += ((order - j) % 2 == 0 ? 1.0 : -1.0) * binom * i_n(seam + (j - order / 2.0) * h, t);
      }
      const double d = std::abs(s / std::pow(h, order));
      o.detail += "d" + std::to_string(order) + "@" + (seam == t ? "t" : "2t") + "=" + fmt("%.3g", d) + " ";
      if (d >= 1e-3) o.pass = false;
      if (d > worst) {
        worst = d;
        worst_order = order;
      }
    }
  }
  bool exact = true;
  for (double a : {1e-3, 0.01, 0.5, 1.0, 3.0}) exact = exact && interp_g(0.0, a) == 0.0 && interp_g(a, a) == 1.0;
  if (!exact) o.pass = false;
  o.detail += std::string("g endpoints exact: ") + (exact ? "yes" : "no") + "; worst order " + std::to_string(worst_order);
  return o;
}

Outcome reproducibility() {
  const std::string cfg =
      "estimators = mle, corrected, jvhw\nfamily = zipf:1.0\nS_grid = 50, 500\nn_grid = 100, 1000\ntrials = 50\n"
      "model = poissonized\nseed = 2718\n";
  const auto run = [&](int threads) {
    std::istringstream in(cfg);
    std::ostringstream out;
    sweep(parse_sweep_config(in), out, {}, threads);
    return out.str();
  };
  const std::string a = run(1);
  Outcome o;
  o.pass = a == run(1) && a == run(4) && a == run(0);
  o.detail = std::to_string(a.size()) + " bytes, 12 cells, threads {1,1,4,default}";
  return o;
}

struct Criterion {
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {"remez constant", remez_constant},
      {"equioscillation", equioscillation},
      {"factorial-moment unbiasedness", factorial_moments},
      {"exact plug-in bias bounds", plugin_bias_bounds},
      {"plug-in global bias bound", mle_global_bias},
      {"squared-log moment inequality", squared_log_moment},
      {"estimator dominance", dominance},
      {"sample-size enlargement band", enlargement},
      {"plug-in bias shape", bias_shape},
      {"two-point lower bound sanity", lower_bound_sanity},
      {"moment matching", moment_matching},
      {"interpolation smoothness", indicator_smoothness},
      {"sweep reproducibility", reproducibility},
  };
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--only N]\n", argv[0]);
      return 2;
    }
  }
  if (only < 0 || only > static_cast<int>(criteria.size())) {
    std::fprintf(stderr, "criterion %d does not exist\n", only);
    return 2;
  }
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only != 0 && static_cast<int>(i) + 1 != only) continue;
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::printf("[%s] %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].name, o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
