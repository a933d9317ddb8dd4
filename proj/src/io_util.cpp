#include "gean/io_util.hpp"

#include <cstdio>
#include <sstream>

namespace gean {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_vector(std::ostream& os, const std::string& key, const Vec& v) {
  os << key << " " << v.size();
  for (Eigen::Index i = 0; i < v.size(); ++i) os << " " << fmt17(v[i]);
  os << "\n";
}

LineReader::LineReader(const std::string& path) : path_(path) {
  file_.open(path);
  if (!file_) throw ParseError("cannot open " + path);
}

std::string LineReader::next() {
  std::string line;
  if (!std::getline(file_, line))
    throw error("unexpected end of file");
  ++line_;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

long long LineReader::keyed_int(const std::string& key) {
  std::istringstream ss(next());
  std::string k;
  long long v;
  if (!(ss >> k >> v) || k != key) throw error("expected '" + key + " <int>'");
  return v;
}

double LineReader::keyed_double(const std::string& key) {
  std::istringstream ss(next());
  std::string k;
  double v;
  if (!(ss >> k >> v) || k != key)
    throw error("expected '" + key + " <number>'");
  return v;
}

Vec LineReader::keyed_vector(const std::string& key) {
  std::istringstream ss(next());
  std::string k;
  Eigen::Index n;
  if (!(ss >> k >> n) || k != key || n < 0)
    throw error("expected '" + key + " <n> <values...>'");
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(ss >> v[i])) throw error("too few values for '" + key + "'");
  }
  return v;
}

std::vector<double> LineReader::csv_row(int n) {
  const std::string line = next();
  std::vector<double> out;
  out.reserve(n);
  std::size_t pos = 0;
  while (pos <= line.size()) {
    std::size_t comma = line.find(',', pos);
    if (comma == std::string::npos) comma = line.size();
    try {
      out.push_back(std::stod(line.substr(pos, comma - pos)));
    } catch (const std::exception&) {
      throw error("bad number at column offset " + std::to_string(pos));
    }
    pos = comma + 1;
    if (comma == line.size()) break;
  }
  if (static_cast<int>(out.size()) != n)
    throw error("expected " + std::to_string(n) + " columns, got " +
                std::to_string(out.size()));
  return out;
}

ParseError LineReader::error(const std::string& msg) const {
  return ParseError(path_ + ":" + std::to_string(line_) + ": " + msg);
}

}  // namespace gean
