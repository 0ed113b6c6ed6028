#include "entest/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "entest/approx.hpp"

namespace entest {

const char* to_string(RateRegime r) { return r == RateRegime::Linear ? "linear" : "sublinear"; }

namespace {

void check_rate_args(double S, double n, double H) {
  if (!(S >= 2.0)) throw std::invalid_argument("rate: S must be >= 2");
  if (!(n >= 2.0)) throw std::invalid_argument("rate: n must be >= 2");
  if (!(H > 0.0) || H > std::log(S) * (1.0 + 1e-12)) throw std::invalid_argument("rate: H must lie in (0, ln S]");
}

// Shared shape: effective sample size m = n (plug-in) or n ln n (minimax).
RateValue rate_shape(double S, double n, double m, double H) {
  const double lnS = std::log(S);
  RateValue out;
  if (S * lnS <= std::numbers::e * m * H) {
    const double bias2 = (S / m) * (S / m);
    const double var = H * lnS / n;
    out.value = bias2 + var;
    out.regime = RateRegime::Linear;
    out.components = std::make_pair(bias2, var);
  } else {
    const double b = H / lnS * std::log(S * lnS / (m * H));
    out.value = b * b;
    out.regime = RateRegime::Sublinear;
  }
  return out;
}

}  // namespace

RateValue rate_mle(double S, double n, double H) {
  check_rate_args(S, n, H);
  return rate_shape(S, n, n, H);
}

RateValue rate_minimax(double S, double n, double H) {
  check_rate_args(S, n, H);
  return rate_shape(S, n, n * std::log(n), H);
}

double sample_complexity(double S, double H, double eps, Which which) {
  if (!(S >= 2.0)) throw std::invalid_argument("sample_complexity: S must be >= 2");
  if (!(H > 0.0)) throw std::invalid_argument("sample_complexity: H must be > 0");
  if (!(eps > 0.0) || eps >= H) throw std::invalid_argument("sample_complexity: eps must lie in (0, H)");
  const double base = std::pow(S, 1.0 - eps / H);
  return which == Which::Mle ? base * std::log(S) / H : base / H;
}

double kl_poisson_product(const DiscreteDistribution& theta1, const DiscreteDistribution& theta0, double n) {
  if (theta1.size() != theta0.size()) throw std::invalid_argument("kl: alphabet sizes differ");
  long double d = 0.0L;
  for (std::size_t i = 0; i < theta1.size(); ++i) {
    const double p = theta1[i];
    const double q = theta0[i];
    if (p == 0.0) continue;
    if (q == 0.0) return std::numeric_limits<double>::infinity();
    d += static_cast<long double>(p) * std::log(static_cast<long double>(p) / q);
  }
  return static_cast<double>(n * d);
}

double lecam_two_point(const DiscreteDistribution& theta0, const DiscreteDistribution& theta1, double n, double T0,
                       double T1) {
  const double kl = kl_poisson_product(theta1, theta0, n);
  return (T1 - T0) * (T1 - T0) / 16.0 * std::exp(-kl);
}

std::pair<DiscreteDistribution, DiscreteDistribution> two_point_variance_pair(std::int64_t S, double H, double n) {
  const double A = solve_two_value_A(S, H);
  if (!(n * A > 1.0)) throw std::invalid_argument("two-point pair: needs n A > 1 so that eps < 1");
  const double eps = 1.0 / std::sqrt(n * A);
  const auto small = static_cast<std::size_t>(S - 1);
  std::vector<double> p1(small, A / static_cast<double>(S - 1));
  p1.push_back(1.0 - A);
  std::vector<double> p0(small, A * (1.0 - eps) / static_cast<double>(S - 1));
  p0.push_back(1.0 - A + A * eps);
  return {DiscreteDistribution(std::move(p0)), DiscreteDistribution(std::move(p1))};
}

TailBound poisson_tail(double lambda, double delta, TailSide side) {
  if (!(lambda > 0.0)) throw std::invalid_argument("poisson_tail: lambda must be > 0");
  TailBound out;
  if (side == TailSide::Upper) {
    if (!(delta > 0.0)) throw std::invalid_argument("poisson_tail: upper side needs delta > 0");
    out.chernoff = std::exp(lambda * (delta - (1.0 + delta) * std::log1p(delta)));
  } else {
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("poisson_tail: lower side needs 0 < delta < 1");
    out.chernoff = std::exp(lambda * (-delta - (1.0 - delta) * std::log1p(-delta)));
    out.gaussian = std::exp(-delta * delta * lambda / 2.0);
  }
  return out;
}

double DiscreteMeasure::mass() const {
  long double s = 0.0L;
  for (double w : weights) s += w;
  return static_cast<double>(s);
}

double DiscreteMeasure::moment(int l) const {
  return integrate([l](double t) { return std::pow(t, l); });
}

void DiscreteMeasure::validate() const {
  if (atoms.size() != weights.size()) throw std::invalid_argument("measure: atoms and weights differ in length");
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (!(atoms[i] >= 0.0)) throw std::invalid_argument("measure: negative atom");
    if (i > 0 && !(atoms[i] > atoms[i - 1])) throw std::invalid_argument("measure: atoms not strictly increasing");
    if (!(weights[i] >= 0.0)) throw std::invalid_argument("measure: negative weight");
  }
  if (mass() > 1.0 + 1e-12) throw std::invalid_argument("measure: total mass exceeds 1");
}

namespace {

// Splits the dual (annihilating) signed measure on the alternation set into
// its positive and negative parts, each normalised to mass 1.
MatchedPair pair_from_alternation(const ApproxPoly& poly) {
  const auto& x = poly.reference;
  const auto& e = poly.reference_error;
  const double lo = poly.interval.lo;
  const double hi = poly.interval.hi;
  std::vector<double> w(x.size(), 1.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double ti = (2.0 * x[i] - lo - hi) / (hi - lo);
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (i != j) w[i] *= std::abs(ti - (2.0 * x[j] - lo - hi) / (hi - lo));
    }
    w[i] = 1.0 / w[i];
  }
  long double total = 0.0L;
  for (double v : w) total += v;

  MatchedPair out;
  out.approx_error = poly.sup_error;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i > 0 && (e[i] > 0.0) == (e[i - 1] > 0.0)) throw MomentMatchingError("moment matching: signs do not alternate", 0.0);
    const double wi = static_cast<double>(2.0L * w[i] / total);
    auto& target = e[i] > 0.0 ? out.nu1 : out.nu0;
    target.atoms.push_back(x[i]);
    target.weights.push_back(wi);
  }
  out.log_gap = out.nu1.integrate([](double t) { return -std::log(t); }) -
                out.nu0.integrate([](double t) { return -std::log(t); });
  return out;
}

double worst_moment_mismatch(const MatchedPair& p, int L) {
  double worst = 0.0;
  for (int l = 0; l <= L; ++l) worst = std::max(worst, std::abs(p.nu1.moment(l) - p.nu0.moment(l)));
  return worst;
}

}  // namespace

MatchedPair moment_matched_measures(int L, double eta, int grid_size) {
  if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("moment_matched_measures: eta must lie in (0,1)");
  if (L < 0) throw std::invalid_argument("moment_matched_measures: L must be >= 0");
  if (grid_size < 10 * (L + 2)) throw std::invalid_argument("moment_matched_measures: grid_size must be >= 10 (L+2)");

  const auto neg_log = [](double t) { return -std::log(t); };
  const ApproxPoly poly = remez_best_approx(neg_log, L, {eta, 1.0});
  MatchedPair out = pair_from_alternation(poly);
  if (worst_moment_mismatch(out, L) < 1e-8 && std::abs(out.log_gap - 2.0 * poly.sup_error) < 1e-6) return out;

  std::vector<double> grid(static_cast<std::size_t>(grid_size));
  for (int j = 0; j < grid_size; ++j) grid[j] = eta + (1.0 - eta) * j / (grid_size - 1.0);
  const ApproxPoly discrete = discrete_best_approx(neg_log, L, grid);
  MatchedPair fallback = pair_from_alternation(discrete);
  fallback.used_grid_fallback = true;
  fallback.approx_error = poly.sup_error;
  if (worst_moment_mismatch(fallback, L) < 1e-8 && std::abs(fallback.log_gap - 2.0 * poly.sup_error) < 1e-6) {
    return fallback;
  }
  throw MomentMatchingError("moment_matched_measures: construction misses tolerance", fallback.log_gap);
}

DiscreteMeasure tilt_measure(const DiscreteMeasure& nu, double eta) {
  if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("tilt_measure: eta must lie in (0,1)");
  DiscreteMeasure out;
  long double kept = 0.0L;
  for (std::size_t i = 0; i < nu.atoms.size(); ++i) {
    const double t = nu.atoms[i];
    if (t < eta * (1.0 - 1e-12)) throw std::invalid_argument("tilt_measure: atom below eta");
    const double w = nu.weights[i] * eta / t;
    out.atoms.push_back(t);
    out.weights.push_back(w);
    kept += w;
  }
  const double deficit = static_cast<double>(1.0L - kept);
  if (deficit > 1e-15) {
    out.atoms.insert(out.atoms.begin(), 0.0);
    out.weights.insert(out.weights.begin(), deficit);
  }
  return out;
}

DiscreteMeasure scale_measure(const DiscreteMeasure& nu, double M) {
  if (!(M > 0.0)) throw std::invalid_argument("scale_measure: M must be > 0");
  DiscreteMeasure out = nu;
  for (double& t : out.atoms) t *= M;
  return out;
}

}  // namespace entest
