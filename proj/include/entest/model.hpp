#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

namespace entest {

using Rng = std::mt19937_64;

/// Probability vector over S symbols. Construction validates
/// nonnegativity and normalisation (|sum - 1| <= 1e-12).
class DiscreteDistribution {
 public:
  explicit DiscreteDistribution(std::vector<double> probs);
  std::size_t size() const { return probs_.size(); }
  const std::vector<double>& probs() const { return probs_; }
  double operator[](std::size_t i) const { return probs_[i]; }

 private:
  std::vector<double> probs_;
};

enum class SamplingModel { Multinomial, Poissonized };

const char* to_string(SamplingModel m);
SamplingModel parse_sampling_model(const std::string& s);

struct Histogram {
  std::vector<std::int64_t> counts;
  std::int64_t nominal_n = 0;
  SamplingModel model = SamplingModel::Multinomial;

  std::int64_t total() const;
};

/// Two halves of a binomially thinned histogram. `n` is the nominal budget of
/// the source; each half behaves like a sample of size n/2.
struct SplitPair {
  std::vector<std::int64_t> x_counts;
  std::vector<std::int64_t> y_counts;
  std::int64_t n = 0;
  // Set when the source was a multinomial histogram: the halves are then
  // not independent.
  bool model_mismatch = false;
};

double entropy(const DiscreteDistribution& p);

// Solves -A ln(A/(S-1)) - (1-A) ln(1-A) = H for A in (0, (S-1)/S].
double solve_two_value_A(std::int64_t S, double H);

namespace family {
struct Uniform {
  std::int64_t S;
};
// (A/(S-1), ..., A/(S-1), 1-A) with entropy H.
struct TwoValue {
  std::int64_t S;
  double H;
};
// K atoms at 15/n, one atom 1 - 15K/n, rest zero. Without K, the largest
// admissible K is used, capped by `H` when given.
struct Spike {
  std::int64_t n;
  std::int64_t S;
  std::optional<std::int64_t> K;
  std::optional<double> H;
};
// p_i proportional to i^-exponent.
struct Zipf {
  std::int64_t S;
  double exponent;
};
}  // namespace family

struct FamilySpec {
  std::variant<family::Uniform, family::TwoValue, family::Spike, family::Zipf> shape;
  // When set, the result must lie in M_S(entropy_cap).
  std::optional<double> entropy_cap;
};

DiscreteDistribution make_family(const FamilySpec& spec);

// Largest spike count for Spike(n, S) under an optional entropy cap.
std::int64_t max_spike_count(std::int64_t n, std::int64_t S, std::optional<double> H);

// Parses "uniform", "zipf:<a>", "twovalue:<H>", "spike" or "spike:<H>" for
// the given S (and n, used by spike).
FamilySpec parse_family(const std::string& text, std::int64_t S, std::int64_t n);

// Symmetric Dirichlet(1) draw (uniform on the simplex).
DiscreteDistribution random_distribution(std::size_t S, Rng& rng);

Histogram sample_multinomial(const DiscreteDistribution& p, std::int64_t n, Rng& rng);
Histogram sample_multinomial(const DiscreteDistribution& p, std::int64_t n, std::uint64_t seed);
Histogram sample_poissonized(const DiscreteDistribution& p, std::int64_t n, Rng& rng);
Histogram sample_poissonized(const DiscreteDistribution& p, std::int64_t n, std::uint64_t seed);

SplitPair split_counts(const Histogram& h, Rng& rng);
SplitPair split_counts(const Histogram& h, std::uint64_t seed);

/// Counter-based seed mixing (splitmix64 finaliser).
std::uint64_t mix_seed(std::uint64_t master, std::uint64_t counter);

}  // namespace entest
