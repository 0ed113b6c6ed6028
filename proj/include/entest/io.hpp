#pragma once

#include <stdexcept>
#include <string>

#include "entest/model.hpp"

namespace entest {

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One nonnegative count per line, optionally preceded by
// `# n=<int> model=<multinomial|poissonized>`. Without a header the model is
// multinomial and n is the total count.
Histogram parse_histogram(const std::string& text);
Histogram read_histogram_file(const std::string& path);

// One probability per line.
DiscreteDistribution read_distribution_file(const std::string& path);

std::string read_text_file(const std::string& path);

// Writes to `path` through a temporary file in the same directory and a rename.
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace entest
