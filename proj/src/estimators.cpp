#include "entest/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace entest {

double EstimatorConfig::delta(double m) const { return c1 * std::log(m) / m; }

int EstimatorConfig::degree(double m) const {
  return std::max(1, static_cast<int>(std::lround(c2 * std::log(m))));
}

namespace {

std::int64_t checked_total(const Histogram& h) {
  const std::int64_t N = h.total();
  if (N <= 0) throw std::invalid_argument("plug-in estimator: histogram has no observations");
  return N;
}

}  // namespace

std::vector<double> mle_per_bin(const Histogram& h, bool corrected) {
  const double N = static_cast<double>(checked_total(h));
  std::vector<double> out(h.counts.size(), 0.0);
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    if (h.counts[i] <= 0) continue;
    const double q = static_cast<double>(h.counts[i]) / N;
    out[i] = -q * std::log(q) + (corrected ? 1.0 / (2.0 * N) : 0.0);
  }
  return out;
}

double mle_entropy(const Histogram& h) {
  const double N = static_cast<double>(checked_total(h));
  long double s = 0.0L;
  for (std::int64_t c : h.counts) {
    if (c <= 0) continue;
    const long double q = static_cast<long double>(c) / N;
    s -= q * std::log(q);
  }
  return static_cast<double>(s);
}

double corrected_mle(const Histogram& h) {
  const double N = static_cast<double>(checked_total(h));
  const auto observed = std::count_if(h.counts.begin(), h.counts.end(), [](std::int64_t c) { return c > 0; });
  return mle_entropy(h) + static_cast<double>(observed) / (2.0 * N);
}

namespace {

#ifdef __SIZEOF_FLOAT128__
using Quad = __float128;
#else
using Quad = long double;
#endif

}  // namespace

double s_kh(double x, const ShiftedCoeffs& g, double n) {
  // The monomial coefficients reach 1e14 around K = 24 and cancel, so the
  // sum is carried in quad precision. The cancellation also amplifies the
  // rounding in x = c/n, so the count is recovered when x lies on the grid.
  const Quad scale = 4.0L * static_cast<long double>(g.delta);
  const Quad qn = n;
  Quad qc = Quad(x) * qn;
  const double rounded = std::nearbyint(static_cast<double>(qc));
  if (std::abs(static_cast<double>(qc) - rounded) <= 1e-9 * std::max(1.0, rounded)) qc = rounded;
  const Quad denom = qn * scale;
  const bool have_lo = g.g_lo.size() == g.g.size();
  Quad prod = 1;
  Quad sum = 0;
  for (int k = 1; k <= g.degree(); ++k) {
    prod *= (qc - Quad(k - 1)) / denom;
    if (prod == 0) break;
    const auto i = static_cast<std::size_t>(k - 1);
    Quad coeff = g.g[i];
    if (have_lo) coeff += g.g_lo[i];
    sum += coeff * prod;
  }
  return static_cast<double>(scale * sum);
}

double l_h(double x, const ShiftedCoeffs& g, double n) { return std::min(s_kh(x, g, n), 1.0); }

double interp_g(double x, double a) {
  if (!(a > 0.0)) throw std::invalid_argument("interp_g: a must be > 0");
  if (!(x >= 0.0 && x <= a)) throw std::invalid_argument("interp_g: x must lie in [0, a]");
  const double u = x / a;
  const double u5 = u * u * u * u * u;
  return u5 * (126.0 + u * (-420.0 + u * (540.0 + u * (-315.0 + u * 70.0))));
}

double i_n(double x, double t) {
  if (x <= t) return 0.0;
  if (x >= 2.0 * t) return 1.0;
  return interp_g(std::min(x - t, t), t);
}

double u_h(double x, double n, double t) {
  if (x <= 0.0) return 0.0;
  const double w = i_n(x, t);
  if (w == 0.0) return 0.0;
  return w * (-x * std::log(x) + 1.0 / (2.0 * n));
}

EstimateResult jvhw_estimate(const SplitPair& pair, const EstimatorConfig& config, bool want_per_bin) {
  if (pair.n < 3) throw std::invalid_argument("jvhw: n must be >= 3 so that each half has ln(n/2) > 0");
  if (pair.x_counts.size() != pair.y_counts.size()) throw std::invalid_argument("jvhw: halves differ in length");
  const double m = static_cast<double>(pair.n) / 2.0;
  const double delta = config.delta(m);
  const double t = delta / 4.0;
  const ShiftedCoeffs g = shift_coeffs(entropy_coeffs(config.degree(m)), delta);

  EstimateResult out;
  if (want_per_bin) {
    out.per_bin.emplace(pair.x_counts.size(), 0.0);
    out.regime.emplace(pair.x_counts.size(), Regime::Nonsmooth);
  }
  long double total = 0.0L;
  for (std::size_t i = 0; i < pair.x_counts.size(); ++i) {
    const double x = static_cast<double>(pair.x_counts[i]) / m;
    const double y = static_cast<double>(pair.y_counts[i]) / m;
    // Ties y == 2 Delta go to the polynomial branch.
    const bool nonsmooth = y <= 2.0 * delta;
    const double v = nonsmooth ? l_h(x, g, m) : u_h(x, m, t);
    total += v;
    if (want_per_bin) {
      (*out.per_bin)[i] = v;
      (*out.regime)[i] = nonsmooth ? Regime::Nonsmooth : Regime::Smooth;
    }
  }
  out.raw_value = static_cast<double>(total);
  out.value = out.raw_value;
  if (config.clamp_output) {
    out.value = std::clamp(out.value, 0.0, std::log(static_cast<double>(std::max<std::size_t>(1, pair.x_counts.size()))));
  }
  return out;
}

const char* to_string(EstimatorId id) {
  switch (id) {
    case EstimatorId::Mle: return "mle";
    case EstimatorId::Corrected: return "corrected";
    case EstimatorId::Jvhw: return "jvhw";
  }
  return "?";
}

EstimatorId parse_estimator(const std::string& s) {
  if (s == "mle") return EstimatorId::Mle;
  if (s == "corrected") return EstimatorId::Corrected;
  if (s == "jvhw") return EstimatorId::Jvhw;
  throw std::invalid_argument("unknown estimator '" + s + "'");
}

}  // namespace entest
