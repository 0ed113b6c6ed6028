#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "entest/estimators.hpp"
#include "entest/model.hpp"

namespace entest {

struct RiskReport {
  double mse = 0.0;
  double bias = 0.0;
  double variance = 0.0;
  double stderr_mse = 0.0;
  std::int64_t trials = 0;
  EstimatorId estimator = EstimatorId::Mle;
  std::string family_id;
  std::int64_t n = 0;
  std::int64_t S = 0;
  double H_true = 0.0;
  SamplingModel model = SamplingModel::Poissonized;
};

struct RiskRequest {
  EstimatorId estimator = EstimatorId::Mle;
  std::int64_t n = 0;
  std::int64_t trials = 0;
  SamplingModel model = SamplingModel::Poissonized;
  std::uint64_t seed = 0;
  EstimatorConfig config{};
  std::string family_id = "custom";
};

// One trial: sample under the model with the given seed (splitting with the
// same stream for jvhw) and return the estimate.
double estimate_once(EstimatorId id, const DiscreteDistribution& p, std::int64_t n, SamplingModel model,
                     std::uint64_t seed, const EstimatorConfig& config);

// Runs the estimator on a histogram; jvhw splits it with `split_seed`.
double run_estimator(EstimatorId id, const Histogram& h, const EstimatorConfig& config, std::uint64_t split_seed);

/// Monte Carlo risk. Trials are distributed over OpenMP threads (`threads`
/// <= 0 uses the runtime default); per-trial seeds come from mix_seed so the
/// report is bit-identical to mc_risk_serial for any thread count.
RiskReport mc_risk(const DiscreteDistribution& p, const RiskRequest& request, int threads = 0);
RiskReport mc_risk_serial(const DiscreteDistribution& p, const RiskRequest& request);

enum class CountModel { Binomial, Poisson };

// -p ln p - E[-p_hat ln p_hat] with n p_hat ~ Binomial(n, p) or Poisson(np),
// by pmf summation truncated at tail mass 1e-12.
double exact_plugin_bias(double p, std::int64_t n, CountModel dist);

struct ExactMoments {
  double mean = 0.0;
  double second = 0.0;
};

// Exhaustive expectation of the estimator under Multinomial(n, P); for jvhw
// the binomial split is enumerated as well. Meant for small S and n.
ExactMoments exact_multinomial_moments(EstimatorId id, const DiscreteDistribution& p, std::int64_t n,
                                       const EstimatorConfig& config = {});

struct SweepConfig {
  std::vector<EstimatorId> estimators;
  std::string family;
  std::vector<std::int64_t> S_grid;
  std::vector<std::int64_t> n_grid;
  std::int64_t trials = 0;
  SamplingModel model = SamplingModel::Poissonized;
  std::uint64_t seed = 0;
  EstimatorConfig config{};
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

SweepConfig parse_sweep_config(std::istream& in);

// Cell key "family|S|n|estimator|model"; rows are keyed by it for resuming.
std::string cell_key(const std::string& family, std::int64_t S, std::int64_t n, EstimatorId id, SamplingModel m);

// Reads rows of a previous sweep output, keyed by cell key.
std::map<std::string, std::string> read_sweep_rows(std::istream& in);

const char* sweep_header();

/// Writes `# schema=1`, the header and one row per cell in grid order.
/// Cells present in `done` are copied verbatim instead of recomputed.
void sweep(const SweepConfig& config, std::ostream& out, const std::map<std::string, std::string>& done = {},
           int threads = 0);

}  // namespace entest
