#include "entest/approx.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <shared_mutex>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace entest {

namespace {

using Wide = boost::multiprecision::cpp_bin_float_50;

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Interpolant in second-kind barycentric form, nodes kept in the scaled
// variable tau in [-1, 1].
struct Barycentric {
  Interval interval;
  std::vector<double> tau;
  std::vector<double> values;
  std::vector<double> weights;

  double to_tau(double x) const {
    return (2.0 * x - interval.lo - interval.hi) / (interval.hi - interval.lo);
  }

  double operator()(double x) const {
    const double t = to_tau(x);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < tau.size(); ++i) {
      const double d = t - tau[i];
      if (d == 0.0) return values[i];
      const double w = weights[i] / d;
      num += w * values[i];
      den += w;
    }
    return num / den;
  }
};

std::vector<double> divided_difference_weights(const std::vector<double>& tau) {
  std::vector<double> w(tau.size(), 1.0);
  for (std::size_t i = 0; i < tau.size(); ++i) {
    for (std::size_t j = 0; j < tau.size(); ++j) {
      if (i != j) w[i] *= (tau[i] - tau[j]);
    }
    w[i] = 1.0 / w[i];
  }
  return w;
}

struct Levelled {
  Barycentric poly;
  double E = 0.0;
};

// Solves p(x_i) + (-1)^i E = f(x_i) on the K+2 reference points. E is the
// ratio of the top divided differences of f and of the alternating signs;
// p then interpolates f - (-1)^i E.
Levelled level(const RealFunction& f, const std::vector<double>& ref, Interval iv) {
  Levelled out;
  out.poly.interval = iv;
  out.poly.tau.resize(ref.size());
  for (std::size_t i = 0; i < ref.size(); ++i) out.poly.tau[i] = out.poly.to_tau(ref[i]);
  out.poly.weights = divided_difference_weights(out.poly.tau);

  std::vector<double> fv(ref.size());
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    fv[i] = f(ref[i]);
    const double sign = (i % 2 == 0) ? 1.0 : -1.0;
    num += out.poly.weights[i] * fv[i];
    den += out.poly.weights[i] * sign;
  }
  out.E = num / den;
  out.poly.values.resize(ref.size());
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const double sign = (i % 2 == 0) ? 1.0 : -1.0;
    out.poly.values[i] = fv[i] - sign * out.E;
  }
  return out;
}

struct Extremum {
  double x;
  double err;
};

double golden_max_abs(const std::function<double(double)>& e, double a, double b) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = std::abs(e(c));
  double fd = std::abs(e(d));
  for (int it = 0; it < 200 && (b - a) > 4.0 * kEps * std::max(std::abs(a), std::abs(b)) + 1e-300;
       ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = std::abs(e(c));
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = std::abs(e(d));
    }
  }
  return fc > fd ? c : d;
}

// Splits sorted samples into maximal same-sign runs and keeps the largest
// |error| of each run. Exact zeros do not break or start a run.
std::vector<Extremum> alternating_extrema(const std::vector<double>& xs, const std::vector<double>& es) {
  std::vector<Extremum> out;
  int run_sign = 0;
  for (std::size_t j = 0; j < xs.size(); ++j) {
    const int s = es[j] > 0.0 ? 1 : (es[j] < 0.0 ? -1 : 0);
    if (s == 0) continue;
    if (s != run_sign) {
      out.push_back({xs[j], es[j]});
      run_sign = s;
    } else if (std::abs(es[j]) > std::abs(out.back().err)) {
      out.back() = {xs[j], es[j]};
    }
  }
  return out;
}

// Pads a short alternation list with interval endpoints carrying the
// opposite sign of their neighbour (covers a zero levelled error at start).
void pad_with_endpoints(std::vector<Extremum>& ext, Interval iv, const std::function<double(double)>& err) {
  if (ext.empty()) return;
  if (ext.front().x > iv.lo) {
    const double e = err(iv.lo);
    if (e == 0.0 || (e > 0.0) != (ext.front().err > 0.0)) {
      ext.insert(ext.begin(), {iv.lo, e == 0.0 ? -std::copysign(0.0, ext.front().err) : e});
    }
  }
  if (ext.back().x < iv.hi) {
    const double e = err(iv.hi);
    if (e == 0.0 || (e > 0.0) != (ext.back().err > 0.0)) {
      ext.push_back({iv.hi, e == 0.0 ? -std::copysign(0.0, ext.back().err) : e});
    }
  }
}

// Of an alternating list, keep `count` consecutive points containing the
// global maximum of |error|.
std::vector<Extremum> choose_reference(const std::vector<Extremum>& ext, std::size_t count) {
  std::size_t imax = 0;
  for (std::size_t i = 1; i < ext.size(); ++i) {
    if (std::abs(ext[i].err) > std::abs(ext[imax].err)) imax = i;
  }
  std::size_t start = imax + 1 >= count ? imax + 1 - count : 0;
  start = std::min(start, ext.size() - count);
  return {ext.begin() + static_cast<std::ptrdiff_t>(start),
          ext.begin() + static_cast<std::ptrdiff_t>(start + count)};
}

std::vector<double> chebyshev_coefficients(const Barycentric& p, int degree) {
  const int n = degree + 1;
  const Interval iv = p.interval;
  std::vector<double> vals(n);
  for (int k = 0; k < n; ++k) {
    const double t = std::cos(std::numbers::pi * (k + 0.5) / n);
    vals[k] = p(0.5 * (iv.lo + iv.hi) + 0.5 * (iv.hi - iv.lo) * t);
  }
  std::vector<double> c(n, 0.0);
  for (int j = 0; j < n; ++j) {
    double s = 0.0;
    for (int k = 0; k < n; ++k) s += vals[k] * std::cos(std::numbers::pi * j * (k + 0.5) / n);
    c[j] = (j == 0 ? 1.0 : 2.0) * s / n;
  }
  return c;
}

double clenshaw(const std::vector<double>& c, double t) {
  double b1 = 0.0;
  double b2 = 0.0;
  for (std::size_t j = c.size(); j-- > 1;) {
    const double b0 = 2.0 * t * b1 - b2 + c[j];
    b2 = b1;
    b1 = b0;
  }
  return t * b1 - b2 + (c.empty() ? 0.0 : c[0]);
}

// Monomial coefficients in x of sum_j c_j T_j(alpha x + beta).
std::vector<Wide> monomial_from_chebyshev(const std::vector<double>& c, Interval iv) {
  const std::size_t n = c.size();
  const Wide alpha = Wide(2) / (Wide(iv.hi) - Wide(iv.lo));
  const Wide beta = -(Wide(iv.hi) + Wide(iv.lo)) / (Wide(iv.hi) - Wide(iv.lo));
  std::vector<Wide> out(n, Wide(0));
  std::vector<Wide> prev(n, Wide(0));
  std::vector<Wide> cur(n, Wide(0));
  prev[0] = 1;
  out[0] += Wide(c[0]);
  if (n == 1) return out;
  cur[0] = beta;
  cur[1] = alpha;
  for (std::size_t k = 0; k < 2; ++k) out[k] += Wide(c[1]) * cur[k];
  for (std::size_t j = 2; j < n; ++j) {
    std::vector<Wide> next(n, Wide(0));
    for (std::size_t k = 0; k < j; ++k) {
      next[k] += 2 * beta * cur[k];
      next[k + 1] += 2 * alpha * cur[k];
    }
    for (std::size_t k = 0; k < n; ++k) next[k] -= prev[k];
    for (std::size_t k = 0; k <= j; ++k) out[k] += Wide(c[j]) * next[k];
    prev = std::move(cur);
    cur = std::move(next);
  }
  return out;
}

ApproxPoly finalize(const RealFunction& f, const Levelled& lv, int degree,
                    const std::vector<Extremum>& ref, int iterations) {
  ApproxPoly out;
  out.degree = degree;
  out.interval = lv.poly.interval;
  out.cheb = chebyshev_coefficients(lv.poly, degree);
  const auto wide = monomial_from_chebyshev(out.cheb, out.interval);
  out.coeffs.resize(wide.size());
  out.coeffs_ext.resize(wide.size());
  out.coeffs_ext_lo.resize(wide.size());
  for (std::size_t k = 0; k < wide.size(); ++k) {
    out.coeffs[k] = static_cast<double>(wide[k]);
    out.coeffs_ext[k] = static_cast<long double>(wide[k]);
    out.coeffs_ext_lo[k] = static_cast<long double>(wide[k] - Wide(out.coeffs_ext[k]));
  }
  out.iterations = iterations;
  out.levelled_error = std::abs(lv.E);
  double sup = 0.0;
  for (const auto& r : ref) {
    out.reference.push_back(r.x);
    out.reference_error.push_back(f(r.x) - out(r.x));
    sup = std::max(sup, std::abs(out.reference_error.back()));
  }
  for (double x : certification_grid(out)) sup = std::max(sup, std::abs(f(x) - out(x)));
  out.sup_error = sup;
  return out;
}

void validate(int degree, Interval iv) {
  if (degree < 0) throw std::invalid_argument("remez: degree must be >= 0");
  if (!(std::isfinite(iv.lo) && std::isfinite(iv.hi)) || !(iv.lo < iv.hi)) {
    throw std::invalid_argument("remez: degenerate interval");
  }
}

using CandidateFn = std::function<std::vector<Extremum>(const std::function<double(double)>&,
                                                        const std::vector<double>&)>;

ApproxPoly exchange(const RealFunction& f, int degree, Interval iv, std::vector<double> ref,
                    const CandidateFn& candidates, const RemezOptions& opt, bool discrete) {
  const std::size_t npts = static_cast<std::size_t>(degree) + 2;
  double fscale = 0.0;
  for (double x : ref) fscale = std::max(fscale, std::abs(f(x)));
  double defect = std::numeric_limits<double>::infinity();
  Levelled lv;
  std::vector<Extremum> chosen;
  for (int it = 1; it <= opt.max_iterations; ++it) {
    lv = level(f, ref, iv);
    const auto err = [&](double x) { return f(x) - lv.poly(x); };
    auto ext = candidates(err, ref);
    if (ext.size() < npts) pad_with_endpoints(ext, iv, err);

    double emax = 0.0;
    for (const auto& e : ext) emax = std::max(emax, std::abs(e.err));
    // f already lies in the approximation space.
    if (emax <= 64.0 * kEps * (fscale + 1e-300)) {
      std::vector<Extremum> r;
      for (double x : ref) r.push_back({x, err(x)});
      return finalize(f, lv, degree, r, it);
    }
    if (ext.size() < npts) {
      throw RemezError("remez: lost alternation (" + std::to_string(ext.size()) + " < " +
                           std::to_string(npts) + " extrema)",
                       finalize(f, lv, degree, ext, it), defect);
    }
    chosen = choose_reference(ext, npts);
    double hi = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    for (const auto& e : chosen) {
      hi = std::max(hi, std::abs(e.err));
      lo = std::min(lo, std::abs(e.err));
    }
    defect = (hi - lo) / hi;
    std::vector<double> next;
    for (const auto& e : chosen) next.push_back(e.x);
    // When the minimax error nears rounding level in f, the spread cannot
    // drop below the evaluation noise.
    const bool at_noise_floor = hi - lo <= 256.0 * kEps * (fscale + 1e-300);
    if (defect < opt.defect_tolerance || at_noise_floor || (discrete && next == ref)) {
      return finalize(f, lv, degree, chosen, it);
    }
    ref = std::move(next);
  }
  throw RemezError("remez: no convergence after " + std::to_string(opt.max_iterations) + " iterations",
                   finalize(f, lv, degree, chosen, opt.max_iterations), defect);
}

std::vector<double> chebyshev_extrema(int degree, Interval iv) {
  const int n = degree + 2;
  std::vector<double> x(n);
  const double mid = 0.5 * (iv.lo + iv.hi);
  const double half = 0.5 * (iv.hi - iv.lo);
  for (int i = 0; i < n; ++i) x[i] = mid - half * std::cos(std::numbers::pi * i / (n - 1));
  x.front() = iv.lo;
  x.back() = iv.hi;
  return x;
}

}  // namespace

double neg_x_log_x(double x) { return x <= 0.0 ? 0.0 : -x * std::log(x); }

double ApproxPoly::operator()(double x) const {
  if (cheb.empty()) {
    long double s = 0.0L;
    for (std::size_t k = coeffs_ext.size(); k-- > 0;) s = s * x + coeffs_ext[k];
    return static_cast<double>(s);
  }
  const double t = (2.0 * x - interval.lo - interval.hi) / (interval.hi - interval.lo);
  return clenshaw(cheb, t);
}

ApproxPoly ApproxPoly::from_monomial(std::vector<double> c, Interval iv) {
  ApproxPoly p;
  p.degree = c.empty() ? 0 : static_cast<int>(c.size()) - 1;
  p.interval = iv;
  p.coeffs_ext.assign(c.begin(), c.end());
  p.coeffs = std::move(c);
  return p;
}

std::vector<double> certification_grid(const ApproxPoly& poly) {
  const std::size_t m = 20 * static_cast<std::size_t>(poly.degree + 1) * (poly.degree + 1);
  std::vector<double> g;
  g.reserve(m + poly.reference.size());
  const Interval iv = poly.interval;
  for (std::size_t j = 0; j < m; ++j) {
    g.push_back(iv.lo + (iv.hi - iv.lo) * static_cast<double>(j) / static_cast<double>(m - 1));
  }
  g.insert(g.end(), poly.reference.begin(), poly.reference.end());
  std::sort(g.begin(), g.end());
  return g;
}

ApproxPoly remez_best_approx(const RealFunction& f, int degree, Interval iv, const RemezOptions& opt) {
  validate(degree, iv);
  const std::size_t npts = static_cast<std::size_t>(degree) + 2;
  // Chebyshev-distributed sampling resolves the clustering of extrema at
  // both ends; the current reference is merged in so no extremum is lost.
  const std::size_t m = std::max<std::size_t>(4000, 40 * npts * npts);
  std::vector<double> base(m);
  const double mid = 0.5 * (iv.lo + iv.hi);
  const double half = 0.5 * (iv.hi - iv.lo);
  for (std::size_t j = 0; j < m; ++j) {
    base[j] = mid - half * std::cos(std::numbers::pi * static_cast<double>(j) / static_cast<double>(m - 1));
  }
  base.front() = iv.lo;
  base.back() = iv.hi;

  const CandidateFn candidates = [&](const std::function<double(double)>& err, const std::vector<double>& ref) {
    std::vector<double> xs = base;
    xs.insert(xs.end(), ref.begin(), ref.end());
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    std::vector<double> es(xs.size());
    for (std::size_t j = 0; j < xs.size(); ++j) es[j] = err(xs[j]);

    auto ext = alternating_extrema(xs, es);
    for (auto& e : ext) {
      const auto it = std::lower_bound(xs.begin(), xs.end(), e.x);
      const std::size_t j = static_cast<std::size_t>(it - xs.begin());
      if (j == 0 || j + 1 >= xs.size()) continue;
      const double xr = golden_max_abs(err, xs[j - 1], xs[j + 1]);
      const double er = err(xr);
      if (std::abs(er) > std::abs(e.err) && (er > 0.0) == (e.err > 0.0)) e = {xr, er};
    }
    return ext;
  };
  return exchange(f, degree, iv, chebyshev_extrema(degree, iv), candidates, opt, false);
}

ApproxPoly discrete_best_approx(const RealFunction& f, int degree, std::span<const double> points,
                                const RemezOptions& opt) {
  std::vector<double> xs(points.begin(), points.end());
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  if (degree < 0) throw std::invalid_argument("discrete remez: degree must be >= 0");
  const std::size_t npts = static_cast<std::size_t>(degree) + 2;
  if (xs.size() < npts) throw std::invalid_argument("discrete remez: fewer points than degree + 2");
  const Interval iv{xs.front(), xs.back()};
  validate(degree, iv);

  // Initial reference: grid points nearest the Chebyshev extrema, made distinct.
  std::vector<double> ref;
  std::size_t last = 0;
  const auto cheb = chebyshev_extrema(degree, iv);
  for (std::size_t i = 0; i < npts; ++i) {
    auto it = std::lower_bound(xs.begin(), xs.end(), cheb[i]);
    std::size_t j = static_cast<std::size_t>(it - xs.begin());
    if (j >= xs.size()) j = xs.size() - 1;
    j = std::max(j, i == 0 ? 0 : last + 1);
    j = std::min(j, xs.size() - (npts - i));
    ref.push_back(xs[j]);
    last = j;
  }
  const CandidateFn candidates = [&](const std::function<double(double)>& err, const std::vector<double>&) {
    std::vector<double> es(xs.size());
    for (std::size_t j = 0; j < xs.size(); ++j) es[j] = err(xs[j]);
    return alternating_extrema(xs, es);
  };
  return exchange(f, degree, iv, ref, candidates, opt, true);
}

const ApproxPoly& entropy_coeffs(int K) {
  if (K < 1) throw std::invalid_argument("entropy_coeffs: K must be >= 1");
  static std::shared_mutex mutex;
  static std::map<int, std::shared_ptr<const ApproxPoly>> cache;
  {
    std::shared_lock lock(mutex);
    if (auto it = cache.find(K); it != cache.end()) return *it->second;
  }
  auto poly = std::make_shared<const ApproxPoly>(remez_best_approx(neg_x_log_x, K, {0.0, 1.0}));
  std::unique_lock lock(mutex);
  auto [it, inserted] = cache.emplace(K, std::move(poly));
  return *it->second;
}

ShiftedCoeffs shift_coeffs(const ApproxPoly& poly, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("shift_coeffs: delta must be > 0");
  if (!(poly.interval == Interval{0.0, 1.0})) {
    throw std::invalid_argument("shift_coeffs: polynomial must live on [0,1]");
  }
  ShiftedCoeffs out;
  out.delta = delta;
  const auto& c = poly.coeffs_ext.empty()
                      ? std::vector<long double>(poly.coeffs.begin(), poly.coeffs.end())
                      : poly.coeffs_ext;
  out.g.assign(c.begin() + 1, c.end());
  if (poly.coeffs_ext_lo.size() == c.size()) {
    out.g_lo.assign(poly.coeffs_ext_lo.begin() + 1, poly.coeffs_ext_lo.end());
  }
  if (!out.g.empty()) {
    // Carry the rounding of the subtraction into the residual.
    const long double shift = std::log(4.0L * static_cast<long double>(delta));
    const long double hi = out.g[0] - shift;
    const long double err = (out.g[0] - hi) - shift;
    out.g[0] = hi;
    if (!out.g_lo.empty()) out.g_lo[0] += err;
  }
  return out;
}

double log_approx_error(int L, double eta) {
  if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("log_approx_error: eta must lie in (0,1)");
  if (L < 0) throw std::invalid_argument("log_approx_error: L must be >= 0");
  return remez_best_approx([](double x) { return -std::log(x); }, L, {eta, 1.0}).sup_error;
}

int count_alternations(const RealFunction& f, const ApproxPoly& poly, std::span<const double> grid,
                       double rel_tol) {
  std::vector<double> xs(grid.begin(), grid.end());
  xs.insert(xs.end(), poly.reference.begin(), poly.reference.end());
  std::sort(xs.begin(), xs.end());
  const double threshold = poly.sup_error * (1.0 - rel_tol);
  int count = 0;
  int last = 0;
  for (double x : xs) {
    const double e = f(x) - poly(x);
    if (std::abs(e) < threshold) continue;
    const int s = e > 0.0 ? 1 : -1;
    if (s != last) {
      ++count;
      last = s;
    }
  }
  return count;
}

}  // namespace entest
