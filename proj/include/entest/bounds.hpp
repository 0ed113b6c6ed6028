#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "entest/model.hpp"

namespace entest {

enum class RateRegime { Linear, Sublinear };

const char* to_string(RateRegime r);

struct RateValue {
  double value = 0.0;
  RateRegime regime = RateRegime::Linear;
  // Present on the linear branch; value = squared_bias_term + variance_term.
  std::optional<std::pair<double, double>> components;
};

// Risk-rate shapes with constant 1 on every term. S and n are real so that
// very large alphabets can be evaluated.
RateValue rate_mle(double S, double n, double H);
RateValue rate_minimax(double S, double n, double H);

enum class Which { Mle, Minimax };
double sample_complexity(double S, double H, double eps, Which which);

// n * D(theta1 || theta0); +infinity when theta0 does not dominate theta1.
double kl_poisson_product(const DiscreteDistribution& theta1, const DiscreteDistribution& theta0, double n);

// (T1 - T0)^2 / 16 * exp(-n D(theta1 || theta0)).
double lecam_two_point(const DiscreteDistribution& theta0, const DiscreteDistribution& theta1, double n, double T0,
                       double T1);

// Pair (theta0, theta1) of the two-value variance construction with
// eps = (nA)^(-1/2).
std::pair<DiscreteDistribution, DiscreteDistribution> two_point_variance_pair(std::int64_t S, double H, double n);

enum class TailSide { Upper, Lower };

struct TailBound {
  double chernoff = 1.0;
  // Lower side only: exp(-delta^2 lambda / 2).
  std::optional<double> gaussian;
};

TailBound poisson_tail(double lambda, double delta, TailSide side);

/// Finite measure on [0, 1] with strictly increasing atoms.
struct DiscreteMeasure {
  std::vector<double> atoms;
  std::vector<double> weights;

  double mass() const;
  double moment(int l) const;
  // Integral of f against the measure.
  template <class F>
  double integrate(F&& f) const {
    long double s = 0.0L;
    for (std::size_t i = 0; i < atoms.size(); ++i) s += static_cast<long double>(weights[i]) * f(atoms[i]);
    return static_cast<double>(s);
  }
  void validate() const;
};

struct MatchedPair {
  DiscreteMeasure nu0;
  DiscreteMeasure nu1;
  // Integral of -ln t against nu1 minus against nu0.
  double log_gap = 0.0;
  // E_L[-ln x] on [eta, 1] used for the construction.
  double approx_error = 0.0;
  bool used_grid_fallback = false;
};

class MomentMatchingError : public std::runtime_error {
 public:
  MomentMatchingError(const std::string& what, double gap) : std::runtime_error(what), achieved_gap(gap) {}
  double achieved_gap;
};

MatchedPair moment_matched_measures(int L, double eta, int grid_size);
DiscreteMeasure tilt_measure(const DiscreteMeasure& nu, double eta);
DiscreteMeasure scale_measure(const DiscreteMeasure& nu, double M);

}  // namespace entest
