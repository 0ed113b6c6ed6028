#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "entest/approx.hpp"
#include "entest/model.hpp"

namespace entest {

/// Tuning of the polynomial-approximation estimator. For an effective sample
/// size m: Delta = c1 ln m / m, K = max(1, round(c2 ln m)), t = Delta / 4.
struct EstimatorConfig {
  double c1 = 1.5;
  double c2 = 3.0;
  bool clamp_output = true;
  std::uint64_t seed = 0;

  double delta(double m) const;
  int degree(double m) const;
  double t(double m) const { return delta(m) / 4.0; }
};

enum class Regime { Smooth, Nonsmooth };

struct EstimateResult {
  // Clamped to [0, ln S] when the config asks for it; otherwise raw_value.
  double value = 0.0;
  double raw_value = 0.0;
  std::optional<std::vector<double>> per_bin;
  std::optional<std::vector<Regime>> regime;
};

double mle_entropy(const Histogram& h);
double corrected_mle(const Histogram& h);

// Per-bin contributions of the plug-in estimators.
std::vector<double> mle_per_bin(const Histogram& h, bool corrected);

/// sum_k g_k (4 Delta)^(1-k) prod_{r<k} (x - r/n).
double s_kh(double x, const ShiftedCoeffs& g, double n);
double l_h(double x, const ShiftedCoeffs& g, double n);

// 126u^5 - 420u^6 + 540u^7 - 315u^8 + 70u^9 with u = x/a, for x in [0, a].
double interp_g(double x, double a);
double i_n(double x, double t);
double u_h(double x, double n, double t);

EstimateResult jvhw_estimate(const SplitPair& pair, const EstimatorConfig& config, bool want_per_bin = false);

enum class EstimatorId { Mle, Corrected, Jvhw };

const char* to_string(EstimatorId id);
EstimatorId parse_estimator(const std::string& s);

}  // namespace entest
