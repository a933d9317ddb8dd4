// Helpers for the text container formats: full-precision number
// formatting and a line reader with positioned parse errors.
#pragma once

#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gean/dynamics.hpp"

namespace gean {

// Formats a double with 17 significant digits (lossless round trip).
std::string fmt17(double v);

void write_vector(std::ostream& os, const std::string& key, const Vec& v);

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class LineReader {
 public:
  explicit LineReader(const std::string& path);

  // Next line; throws ParseError at end of file.
  std::string next();
  // Parses "key value" lines, checking the key.
  long long keyed_int(const std::string& key);
  double keyed_double(const std::string& key);
  Vec keyed_vector(const std::string& key);
  // Parses a comma-separated row of exactly n doubles.
  std::vector<double> csv_row(int n);

  ParseError error(const std::string& msg) const;

 private:
  std::ifstream file_;
  std::string path_;
  int line_ = 0;
};

}  // namespace gean
