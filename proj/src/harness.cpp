#include "entest/harness.hpp"

#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <istream>
#include <limits>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "entest/bounds.hpp"

namespace entest {

double run_estimator(EstimatorId id, const Histogram& h, const EstimatorConfig& config, std::uint64_t split_seed) {
  switch (id) {
    case EstimatorId::Mle: return mle_entropy(h);
    case EstimatorId::Corrected: return corrected_mle(h);
    case EstimatorId::Jvhw: return jvhw_estimate(split_counts(h, split_seed), config).value;
  }
  throw std::invalid_argument("unknown estimator");
}

double estimate_once(EstimatorId id, const DiscreteDistribution& p, std::int64_t n, SamplingModel model,
                     std::uint64_t seed, const EstimatorConfig& config) {
  Rng rng(seed);
  const Histogram h = model == SamplingModel::Multinomial ? sample_multinomial(p, n, rng) : sample_poissonized(p, n, rng);
  if (id == EstimatorId::Jvhw) return jvhw_estimate(split_counts(h, rng), config).value;
  // A Poissonized draw can be empty; the plug-in value of no data is 0.
  if (h.total() == 0) return 0.0;
  return id == EstimatorId::Mle ? mle_entropy(h) : corrected_mle(h);
}

namespace {

void check_request(const RiskRequest& r) {
  if (r.trials < 2) throw std::invalid_argument("mc_risk: trials must be >= 2");
  if (r.n < 2) throw std::invalid_argument("mc_risk: n must be >= 2");
  if (r.estimator == EstimatorId::Jvhw) {
    if (r.n < 3) throw std::invalid_argument("mc_risk: jvhw needs n >= 3");
    // Warm the coefficient cache before trials fan out.
    entropy_coeffs(r.config.degree(static_cast<double>(r.n) / 2.0));
  }
}

RiskReport summarise(const DiscreteDistribution& p, const RiskRequest& r, const std::vector<double>& est) {
  const double H = entropy(p);
  const auto T = static_cast<double>(est.size());
  long double se = 0.0L;
  long double se2 = 0.0L;
  long double s4 = 0.0L;
  for (double v : est) {
    const long double e = static_cast<long double>(v) - H;
    se += e;
    se2 += e * e;
    s4 += e * e * e * e;
  }
  RiskReport out;
  out.trials = static_cast<std::int64_t>(est.size());
  out.estimator = r.estimator;
  out.family_id = r.family_id;
  out.n = r.n;
  out.S = static_cast<std::int64_t>(p.size());
  out.H_true = H;
  out.model = r.model;
  const long double mean_e = se / T;
  const long double mse = se2 / T;
  out.bias = static_cast<double>(mean_e);
  out.mse = static_cast<double>(mse);
  out.variance = static_cast<double>((se2 - T * mean_e * mean_e) / (T - 1.0));
  const long double var_sq = (s4 - T * mse * mse) / (T - 1.0);
  out.stderr_mse = static_cast<double>(std::sqrt(std::max(0.0L, var_sq) / T));
  return out;
}

}  // namespace

RiskReport mc_risk_serial(const DiscreteDistribution& p, const RiskRequest& r) {
  check_request(r);
  std::vector<double> est(static_cast<std::size_t>(r.trials));
  for (std::int64_t t = 0; t < r.trials; ++t) {
    est[static_cast<std::size_t>(t)] =
        estimate_once(r.estimator, p, r.n, r.model, mix_seed(r.seed, static_cast<std::uint64_t>(t)), r.config);
  }
  return summarise(p, r, est);
}

RiskReport mc_risk(const DiscreteDistribution& p, const RiskRequest& r, int threads) {
  check_request(r);
  std::vector<double> est(static_cast<std::size_t>(r.trials));
  std::exception_ptr failure;
  std::mutex failure_mutex;
#ifdef _OPENMP
  const int nthreads = threads > 0 ? threads : omp_get_max_threads();
#else
  const int nthreads = threads;
  (void)nthreads;
#endif
#pragma omp parallel for schedule(static) num_threads(nthreads)
  for (std::int64_t t = 0; t < r.trials; ++t) {
    try {
      est[static_cast<std::size_t>(t)] =
          estimate_once(r.estimator, p, r.n, r.model, mix_seed(r.seed, static_cast<std::uint64_t>(t)), r.config);
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return summarise(p, r, est);
}

double exact_plugin_bias(double p, std::int64_t n, CountModel dist) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("exact_plugin_bias: p must lie in [0,1]");
  if (n < 1) throw std::invalid_argument("exact_plugin_bias: n must be >= 1");
  if (p == 0.0) return 0.0;
  const double nd = static_cast<double>(n);
  const double lambda = nd * p;
  const auto log_pmf = [&](std::int64_t k) {
    const double kd = static_cast<double>(k);
    if (dist == CountModel::Poisson) return kd * std::log(lambda) - lambda - std::lgamma(kd + 1.0);
    if (p == 1.0) return k == n ? 0.0 : -std::numeric_limits<double>::infinity();
    return std::lgamma(nd + 1.0) - std::lgamma(kd + 1.0) - std::lgamma(nd - kd + 1.0) + kd * std::log(p) +
           (nd - kd) * std::log1p(-p);
  };
  const std::int64_t kmax = dist == CountModel::Binomial ? n : std::numeric_limits<std::int64_t>::max();
  const auto mode = std::min<std::int64_t>(kmax, static_cast<std::int64_t>(std::floor(lambda)));
  // Walk outward from the mode until both tails are negligible.
  long double mass = 0.0L;
  long double expect = 0.0L;
  const auto add = [&](std::int64_t k) {
    const long double w = std::exp(static_cast<long double>(log_pmf(k)));
    mass += w;
    if (k > 0) {
      const long double q = static_cast<long double>(k) / nd;
      expect -= w * q * std::log(q);
    }
    return w;
  };
  add(mode);
  for (std::int64_t k = mode - 1; k >= 0; --k) {
    if (add(k) < 1e-18L && mode - k > 10) break;
  }
  for (std::int64_t k = mode + 1; k <= kmax; ++k) {
    if (add(k) < 1e-18L && k - mode > 10 && mass > 1.0L - 1e-12L) break;
  }
  return neg_x_log_x(p) - static_cast<double>(expect / mass);
}

namespace {

// Visits all compositions of n into S parts with their multinomial weight.
void for_each_composition(const std::vector<double>& p, std::int64_t n,
                          const std::function<void(const std::vector<std::int64_t>&, double)>& visit) {
  std::vector<std::int64_t> c(p.size(), 0);
  std::function<void(std::size_t, std::int64_t, double)> rec = [&](std::size_t i, std::int64_t left, double logw) {
    if (i + 1 == p.size()) {
      c[i] = left;
      double lw = logw - std::lgamma(static_cast<double>(left) + 1.0);
      if (left > 0) {
        if (p[i] == 0.0) return;
        lw += static_cast<double>(left) * std::log(p[i]);
      }
      visit(c, std::exp(lw + std::lgamma(static_cast<double>(n) + 1.0)));
      return;
    }
    for (std::int64_t k = 0; k <= left; ++k) {
      if (k > 0 && p[i] == 0.0) break;
      c[i] = k;
      const double term = -std::lgamma(static_cast<double>(k) + 1.0) + (k > 0 ? static_cast<double>(k) * std::log(p[i]) : 0.0);
      rec(i + 1, left - k, logw + term);
    }
  };
  rec(0, n, 0.0);
}

double binom_pmf_half(std::int64_t z, std::int64_t k) {
  return std::exp(std::lgamma(z + 1.0) - std::lgamma(k + 1.0) - std::lgamma(z - k + 1.0) - static_cast<double>(z) * std::log(2.0));
}

}  // namespace

ExactMoments exact_multinomial_moments(EstimatorId id, const DiscreteDistribution& p, std::int64_t n,
                                       const EstimatorConfig& config) {
  if (n < 1) throw std::invalid_argument("exact_multinomial_moments: n must be >= 1");
  ExactMoments out;
  for_each_composition(p.probs(), n, [&](const std::vector<std::int64_t>& counts, double w) {
    Histogram h{counts, n, SamplingModel::Multinomial};
    if (id != EstimatorId::Jvhw) {
      const double v = id == EstimatorId::Mle ? mle_entropy(h) : corrected_mle(h);
      out.mean += w * v;
      out.second += w * v * v;
      return;
    }
    SplitPair pair{std::vector<std::int64_t>(counts.size(), 0), std::vector<std::int64_t>(counts.size(), 0), n, true};
    std::function<void(std::size_t, double)> rec = [&](std::size_t i, double ws) {
      if (i == counts.size()) {
        const double v = jvhw_estimate(pair, config).value;
        out.mean += w * ws * v;
        out.second += w * ws * v * v;
        return;
      }
      for (std::int64_t k = 0; k <= counts[i]; ++k) {
        pair.x_counts[i] = k;
        pair.y_counts[i] = counts[i] - k;
        rec(i + 1, ws * binom_pmf_half(counts[i], k));
      }
    };
    rec(0, 1.0);
  });
  return out;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::int64_t parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long long x = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing");
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config field '" + key + "': expected an integer, got '" + v + "'");
  }
}

double parse_real(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing");
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config field '" + key + "': expected a number, got '" + v + "'");
  }
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

SweepConfig parse_sweep_config(std::istream& in) {
  SweepConfig cfg;
  std::set<std::string> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!seen.insert(key).second) throw ConfigError("config field '" + key + "': given twice");
    try {
      if (key == "estimators") {
        for (const auto& e : split_list(value)) cfg.estimators.push_back(parse_estimator(e));
      } else if (key == "family") {
        if (value.empty()) throw ConfigError("config field 'family': empty");
        parse_family(value, 2, 15);
        cfg.family = value;
      } else if (key == "S_grid") {
        for (const auto& v : split_list(value)) cfg.S_grid.push_back(parse_int(key, v));
      } else if (key == "n_grid") {
        for (const auto& v : split_list(value)) cfg.n_grid.push_back(parse_int(key, v));
      } else if (key == "trials") {
        cfg.trials = parse_int(key, value);
        if (cfg.trials < 2) throw ConfigError("config field 'trials': must be >= 2");
      } else if (key == "model") {
        cfg.model = parse_sampling_model(value);
      } else if (key == "seed") {
        cfg.seed = static_cast<std::uint64_t>(parse_int(key, value));
      } else if (key == "c1") {
        cfg.config.c1 = parse_real(key, value);
        if (!(cfg.config.c1 > 0.0)) throw ConfigError("config field 'c1': must be > 0");
      } else if (key == "c2") {
        cfg.config.c2 = parse_real(key, value);
        if (!(cfg.config.c2 > 0.0)) throw ConfigError("config field 'c2': must be > 0");
      } else if (key == "clamp") {
        if (value != "true" && value != "false") throw ConfigError("config field 'clamp': expected true or false");
        cfg.config.clamp_output = value == "true";
      } else {
        throw ConfigError("config field '" + key + "': unknown key");
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError("config field '" + key + "': " + e.what());
    }
  }
  for (const char* required : {"estimators", "family", "S_grid", "n_grid", "trials"}) {
    if (!seen.count(required)) throw ConfigError(std::string("config field '") + required + "': missing");
  }
  for (auto S : cfg.S_grid) {
    if (S < 1) throw ConfigError("config field 'S_grid': entries must be >= 1");
  }
  for (auto n : cfg.n_grid) {
    if (n < 2) throw ConfigError("config field 'n_grid': entries must be >= 2");
  }
  return cfg;
}

std::string cell_key(const std::string& family, std::int64_t S, std::int64_t n, EstimatorId id, SamplingModel m) {
  return family + "|" + std::to_string(S) + "|" + std::to_string(n) + "|" + to_string(id) + "|" + to_string(m);
}

const char* sweep_header() {
  return "family,S,n,H_true,estimator,model,trials,mse,bias,variance,stderr_mse,rate_mle,rate_minimax";
}

std::map<std::string, std::string> read_sweep_rows(std::istream& in) {
  std::map<std::string, std::string> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line == sweep_header()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) f.push_back(item);
    if (f.size() != 13) continue;
    try {
      rows[cell_key(f[0], std::stoll(f[1]), std::stoll(f[2]), parse_estimator(f[4]), parse_sampling_model(f[5]))] = line;
    } catch (const std::exception&) {
      // Partial or foreign line; the cell is recomputed.
    }
  }
  return rows;
}

void sweep(const SweepConfig& cfg, std::ostream& out, const std::map<std::string, std::string>& done, int threads) {
  out << "# schema=1\n" << sweep_header() << '\n';
  for (auto S : cfg.S_grid) {
    for (auto n : cfg.n_grid) {
      const FamilySpec spec = parse_family(cfg.family, S, n);
      const DiscreteDistribution p = make_family(spec);
      const double H = entropy(p);
      double rm = std::numeric_limits<double>::quiet_NaN();
      double rx = rm;
      if (S >= 2 && H > 0.0) {
        rm = rate_mle(static_cast<double>(S), static_cast<double>(n), H).value;
        rx = rate_minimax(static_cast<double>(S), static_cast<double>(n), H).value;
      }
      for (auto id : cfg.estimators) {
        const std::string key = cell_key(cfg.family, S, n, id, cfg.model);
        if (auto it = done.find(key); it != done.end()) {
          out << it->second << '\n';
          continue;
        }
        RiskRequest req{id, n, cfg.trials, cfg.model, mix_seed(cfg.seed, fnv1a(key)), cfg.config, cfg.family};
        const RiskReport r = mc_risk(p, req, threads);
        out << cfg.family << ',' << S << ',' << n << ',' << fmt(H) << ',' << to_string(id) << ','
            << to_string(cfg.model) << ',' << r.trials << ',' << fmt(r.mse) << ',' << fmt(r.bias) << ','
            << fmt(r.variance) << ',' << fmt(r.stderr_mse) << ',' << fmt(rm) << ',' << fmt(rx) << '\n';
      }
    }
  }
}

}  // namespace entest
