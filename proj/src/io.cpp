#include "entest/io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace entest {

namespace {

std::string strip(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open input file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Histogram parse_histogram(const std::string& text) {
  Histogram h;
  h.model = SamplingModel::Multinomial;
  bool have_n = false;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip(line);
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream fields(line.substr(1));
      std::string kv;
      while (fields >> kv) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = kv.substr(0, eq);
        const std::string value = kv.substr(eq + 1);
        if (key == "n") {
          try {
            h.nominal_n = std::stoll(value);
          } catch (const std::exception&) {
            throw InputError("histogram header: bad n '" + value + "'");
          }
          have_n = true;
        } else if (key == "model") {
          try {
            h.model = parse_sampling_model(value);
          } catch (const std::exception& e) {
            throw InputError(std::string("histogram header: ") + e.what());
          }
        }
      }
      continue;
    }
    std::size_t used = 0;
    long long c = -1;
    try {
      c = std::stoll(line, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != line.size() || c < 0) {
      throw InputError("histogram line " + std::to_string(lineno) + ": expected a nonnegative integer, got '" + line + "'");
    }
    h.counts.push_back(c);
  }
  if (h.counts.empty()) throw InputError("histogram has no bins");
  if (!have_n) h.nominal_n = h.total();
  if (h.model == SamplingModel::Multinomial && h.total() != h.nominal_n) {
    throw InputError("multinomial histogram: counts sum to " + std::to_string(h.total()) + " but n=" +
                     std::to_string(h.nominal_n));
  }
  return h;
}

Histogram read_histogram_file(const std::string& path) { return parse_histogram(read_text_file(path)); }

DiscreteDistribution read_distribution_file(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::vector<double> p;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip(line);
    if (line.empty() || line[0] == '#') continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(line, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != line.size()) throw InputError(path + ": line " + std::to_string(lineno) + " is not a number");
    p.push_back(v);
  }
  try {
    return DiscreteDistribution(std::move(p));
  } catch (const std::invalid_argument& e) {
    throw InputError(path + ": " + e.what());
  }
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot rename onto " + path + ": " + ec.message());
  }
}

}  // namespace entest
