#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace entest {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  bool operator==(const Interval&) const = default;
};

/// Best uniform polynomial approximation on `interval`.
///
/// `coeffs` holds the monomial coefficients r_0..r_K in double precision as
/// dumped by the CLI. At high degree these coefficients are huge and cancel,
/// so evaluation goes through the Chebyshev form (`cheb`) and consumers that
/// need the monomial basis numerically use `coeffs_ext`.
struct ApproxPoly {
  int degree = 0;
  std::vector<double> coeffs;
  Interval interval;
  double sup_error = 0.0;

  std::vector<long double> coeffs_ext;
  // coeffs_ext[k] + coeffs_ext_lo[k] carries about 128 bits of r_k.
  std::vector<long double> coeffs_ext_lo;
  std::vector<double> cheb;
  // Final alternation set and the signed error f - p at each point.
  std::vector<double> reference;
  std::vector<double> reference_error;
  int iterations = 0;
  double levelled_error = 0.0;

  double operator()(double x) const;

  // Builds a polynomial from monomial coefficients (no certification; the
  // sup_error is left at 0).
  static ApproxPoly from_monomial(std::vector<double> coeffs, Interval interval = {});
};

struct RemezOptions {
  int max_iterations = 100;
  double defect_tolerance = 1e-10;
};

class RemezError : public std::runtime_error {
 public:
  RemezError(const std::string& what, ApproxPoly last, double defect)
      : std::runtime_error(what), last_iterate(std::move(last)), levelling_defect(defect) {}
  ApproxPoly last_iterate;
  double levelling_defect;
};

using RealFunction = std::function<double(double)>;

/// Remez exchange with multi-point exchange, initialised at Chebyshev
/// extrema. Throws std::invalid_argument on a bad interval or degree and
/// RemezError when the levelling defect does not drop below tolerance.
ApproxPoly remez_best_approx(const RealFunction& f, int degree, Interval interval,
                             const RemezOptions& options = {});

// -x ln x with the continuous extension 0 at x = 0.
double neg_x_log_x(double x);

/// Best approximation of -x ln x on [0,1], cached by degree.
/// Safe to call from concurrent threads.
const ApproxPoly& entropy_coeffs(int K);

struct ShiftedCoeffs {
  // g_1..g_K (index 0 is g_1).
  std::vector<long double> g;
  // Optional low-order parts (same length as g when present).
  std::vector<long double> g_lo;
  double delta = 0.0;
  int degree() const { return static_cast<int>(g.size()); }
};

/// Drops r_0 and subtracts ln(4 delta) from r_1.
ShiftedCoeffs shift_coeffs(const ApproxPoly& poly, double delta);

/// E_L[-ln x] on [eta, 1].
double log_approx_error(int L, double eta);

// Discrete best approximation restricted to a finite point set (exchange on
// the set). Same result type as remez_best_approx.
ApproxPoly discrete_best_approx(const RealFunction& f, int degree, std::span<const double> points,
                                const RemezOptions& options = {});

// Counts sign alternations of f - p among points where |f - p| is within
// rel_tol * sup_error of sup_error. Scans `grid` and the stored reference.
int count_alternations(const RealFunction& f, const ApproxPoly& poly, std::span<const double> grid,
                       double rel_tol = 1e-7);

// 20 (K+1)^2 uniform points on the interval together with the reference set.
std::vector<double> certification_grid(const ApproxPoly& poly);

}  // namespace entest
