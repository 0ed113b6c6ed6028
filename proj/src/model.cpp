#include "entest/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace entest {

DiscreteDistribution::DiscreteDistribution(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw std::invalid_argument("distribution: alphabet size must be >= 1");
  long double sum = 0.0L;
  for (double p : probs_) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw std::invalid_argument("distribution: negative or non-finite entry");
    sum += p;
  }
  if (std::abs(sum - 1.0L) > 1e-12L) {
    std::ostringstream os;
    os.precision(17);
    os << "distribution: entries sum to " << static_cast<double>(sum) << ", not 1";
    throw std::invalid_argument(os.str());
  }
}

const char* to_string(SamplingModel m) {
  return m == SamplingModel::Multinomial ? "multinomial" : "poissonized";
}

SamplingModel parse_sampling_model(const std::string& s) {
  if (s == "multinomial") return SamplingModel::Multinomial;
  if (s == "poissonized" || s == "poisson") return SamplingModel::Poissonized;
  throw std::invalid_argument("unknown sampling model '" + s + "'");
}

std::int64_t Histogram::total() const { return std::accumulate(counts.begin(), counts.end(), std::int64_t{0}); }

double entropy(const DiscreteDistribution& p) {
  long double h = 0.0L;
  for (double q : p.probs()) {
    if (q > 0.0) h -= static_cast<long double>(q) * std::log(static_cast<long double>(q));
  }
  return std::clamp(static_cast<double>(h), 0.0, std::log(static_cast<double>(p.size())));
}

namespace {

double two_value_entropy(std::int64_t S, double A) {
  double h = 0.0;
  if (A > 0.0) h -= A * std::log(A / static_cast<double>(S - 1));
  if (A < 1.0) h -= (1.0 - A) * std::log1p(-A);
  return h;
}

double spike_entropy(std::int64_t n, std::int64_t N) {
  const double a = 15.0 / static_cast<double>(n);
  const double big = 1.0 - a * static_cast<double>(N);
  double h = -a * static_cast<double>(N) * std::log(a);
  if (big > 0.0) h -= big * std::log(big);
  return h;
}

}  // namespace

double solve_two_value_A(std::int64_t S, double H) {
  if (S < 2) throw std::invalid_argument("solve_two_value_A: S must be >= 2");
  const double hmax = std::log(static_cast<double>(S));
  if (!(H > 0.0) || H > hmax * (1.0 + 1e-15)) {
    throw std::invalid_argument("solve_two_value_A: H must lie in (0, ln S]");
  }
  double lo = std::numeric_limits<double>::epsilon();
  double hi = static_cast<double>(S - 1) / static_cast<double>(S);
  if (two_value_entropy(S, hi) <= H) return hi;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double v = two_value_entropy(S, mid);
    if (std::abs(v - H) < 1e-13) return mid;
    (v < H ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::int64_t max_spike_count(std::int64_t n, std::int64_t S, std::optional<double> H) {
  if (n < 15) throw std::invalid_argument("spike family: n must be >= 15");
  if (S < 2) throw std::invalid_argument("spike family: S must be >= 2");
  std::int64_t K = std::min<std::int64_t>(n / 15, S - 1);
  if (H) {
    while (K > 0 && spike_entropy(n, K) > *H) --K;
  }
  return K;
}

DiscreteDistribution make_family(const FamilySpec& spec) {
  std::vector<double> p;
  if (const auto* u = std::get_if<family::Uniform>(&spec.shape)) {
    if (u->S < 1) throw std::invalid_argument("uniform family: S must be >= 1");
    p.assign(static_cast<std::size_t>(u->S), 1.0 / static_cast<double>(u->S));
  } else if (const auto* t = std::get_if<family::TwoValue>(&spec.shape)) {
    const double A = solve_two_value_A(t->S, t->H);
    p.assign(static_cast<std::size_t>(t->S - 1), A / static_cast<double>(t->S - 1));
    p.push_back(1.0 - A);
  } else if (const auto* s = std::get_if<family::Spike>(&spec.shape)) {
    const std::int64_t kmax = max_spike_count(s->n, s->S, s->H);
    const std::int64_t K = s->K.value_or(kmax);
    if (K < 0 || K > std::min<std::int64_t>(s->n / 15, s->S - 1)) {
      throw std::invalid_argument("spike family: K must lie in [0, min(floor(n/15), S-1)]");
    }
    if (s->H && spike_entropy(s->n, K) > *s->H) {
      throw std::invalid_argument("spike family: entropy of K spikes exceeds H");
    }
    p.assign(static_cast<std::size_t>(s->S), 0.0);
    const double a = 15.0 / static_cast<double>(s->n);
    for (std::int64_t i = 0; i < K; ++i) p[static_cast<std::size_t>(i)] = a;
    p[static_cast<std::size_t>(K)] = std::max(0.0, 1.0 - a * static_cast<double>(K));
  } else {
    const auto& z = std::get<family::Zipf>(spec.shape);
    if (z.S < 1) throw std::invalid_argument("zipf family: S must be >= 1");
    if (!(z.exponent >= 0.0)) throw std::invalid_argument("zipf family: exponent must be >= 0");
    p.resize(static_cast<std::size_t>(z.S));
    long double total = 0.0L;
    for (std::size_t i = 0; i < p.size(); ++i) {
      p[i] = std::pow(static_cast<double>(i + 1), -z.exponent);
      total += p[i];
    }
    for (double& q : p) q = static_cast<double>(q / total);
  }
  DiscreteDistribution d(std::move(p));
  if (spec.entropy_cap && entropy(d) > *spec.entropy_cap + 1e-12) {
    std::ostringstream os;
    os.precision(12);
    os << "family: entropy " << entropy(d) << " exceeds cap " << *spec.entropy_cap;
    throw std::invalid_argument(os.str());
  }
  return d;
}

FamilySpec parse_family(const std::string& text, std::int64_t S, std::int64_t n) {
  const auto colon = text.find(':');
  const std::string name = text.substr(0, colon);
  std::optional<double> arg;
  if (colon != std::string::npos) {
    try {
      std::size_t used = 0;
      arg = std::stod(text.substr(colon + 1), &used);
      if (used != text.size() - colon - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw std::invalid_argument("family: bad parameter in '" + text + "'");
    }
  }
  if (name == "uniform" && !arg) return {family::Uniform{S}, {}};
  if (name == "zipf") return {family::Zipf{S, arg.value_or(1.0)}, {}};
  if (name == "twovalue" && arg) return {family::TwoValue{S, *arg}, {}};
  if (name == "spike") return {family::Spike{n, S, std::nullopt, arg}, arg};
  throw std::invalid_argument("family: unknown family '" + text + "'");
}

DiscreteDistribution random_distribution(std::size_t S, Rng& rng) {
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> w(S);
  long double total = 0.0L;
  for (double& x : w) {
    x = expo(rng);
    total += x;
  }
  for (double& x : w) x = static_cast<double>(x / total);
  return DiscreteDistribution(std::move(w));
}

Histogram sample_multinomial(const DiscreteDistribution& p, std::int64_t n, Rng& rng) {
  if (n < 0) throw std::invalid_argument("sample_multinomial: n must be >= 0");
  const auto& q = p.probs();
  Histogram h{std::vector<std::int64_t>(q.size(), 0), n, SamplingModel::Multinomial};
  std::vector<long double> tail(q.size() + 1, 0.0L);
  for (std::size_t i = q.size(); i-- > 0;) tail[i] = tail[i + 1] + q[i];
  std::int64_t left = n;
  for (std::size_t i = 0; i < q.size() && left > 0; ++i) {
    if (q[i] <= 0.0) continue;
    const long double rest = tail[i];
    const double prob = rest > 0.0L ? static_cast<double>(q[i] / rest) : 1.0;
    if (prob >= 1.0 || tail[i + 1] <= 0.0L) {
      h.counts[i] = left;
      left = 0;
      break;
    }
    std::binomial_distribution<std::int64_t> bin(left, prob);
    h.counts[i] = bin(rng);
    left -= h.counts[i];
  }
  return h;
}

Histogram sample_multinomial(const DiscreteDistribution& p, std::int64_t n, std::uint64_t seed) {
  Rng rng(seed);
  return sample_multinomial(p, n, rng);
}

Histogram sample_poissonized(const DiscreteDistribution& p, std::int64_t n, Rng& rng) {
  if (n < 0) throw std::invalid_argument("sample_poissonized: n must be >= 0");
  const auto& q = p.probs();
  Histogram h{std::vector<std::int64_t>(q.size(), 0), n, SamplingModel::Poissonized};
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double rate = static_cast<double>(n) * q[i];
    if (rate <= 0.0) continue;
    std::poisson_distribution<std::int64_t> poi(rate);
    h.counts[i] = poi(rng);
  }
  return h;
}

Histogram sample_poissonized(const DiscreteDistribution& p, std::int64_t n, std::uint64_t seed) {
  Rng rng(seed);
  return sample_poissonized(p, n, rng);
}

SplitPair split_counts(const Histogram& h, Rng& rng) {
  SplitPair out{std::vector<std::int64_t>(h.counts.size(), 0), std::vector<std::int64_t>(h.counts.size(), 0),
                h.nominal_n, h.model == SamplingModel::Multinomial};
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    const std::int64_t z = h.counts[i];
    if (z < 0) throw std::invalid_argument("split_counts: negative count");
    if (z == 0) continue;
    std::binomial_distribution<std::int64_t> half(z, 0.5);
    out.x_counts[i] = half(rng);
    out.y_counts[i] = z - out.x_counts[i];
  }
  return out;
}

SplitPair split_counts(const Histogram& h, std::uint64_t seed) {
  Rng rng(seed);
  return split_counts(h, rng);
}

std::uint64_t mix_seed(std::uint64_t master, std::uint64_t counter) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (counter + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace entest
