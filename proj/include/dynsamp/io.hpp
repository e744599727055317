#pragma once

#include <Eigen/Dense>

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "dynsamp/error.hpp"

namespace dynsamp {

/// Shortest round-trip decimal form of a double; keeps CSV output stable
/// across runs and parallelism levels.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  if (res.ec != std::errc()) throw Error(ErrorKind::numerical, "format");
  return std::string(buf, res.ptr);
}

inline void write_text_file(const std::string& path,
                            const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path);
  out << content;
  if (!out) throw Error(ErrorKind::io, "failed writing " + path);
}

/// Dense matrix dump with a "rows cols" header line; debug aid for
/// inspecting dictionaries.
inline std::string matrix_to_csv(const Eigen::MatrixXd& m) {
  std::string out = std::to_string(m.rows()) + " " + std::to_string(m.cols()) +
                    "\n";
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out += ',';
      out += format_double(m(r, c));
    }
    out += '\n';
  }
  return out;
}

/// Signal file: one real per line.
inline Eigen::VectorXd load_signal(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path);
  std::vector<double> values;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos || line[pos] == '#') continue;
    std::istringstream ls(line);
    double v = 0;
    std::string extra;
    if (!(ls >> v) || (ls >> extra))
      throw Error(ErrorKind::parse,
                  path + ":" + std::to_string(line_no) +
                      ": expected one real per line");
    values.push_back(v);
  }
  if (values.empty())
    throw Error(ErrorKind::parse, path + ": empty signal file");
  Eigen::VectorXd x(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    x(static_cast<Eigen::Index>(i)) = values[i];
  return x;
}

inline void save_signal(const Eigen::VectorXd& x, const std::string& path) {
  std::string out;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    out += format_double(x(i));
    out += '\n';
  }
  write_text_file(path, out);
}

}  // namespace dynsamp
