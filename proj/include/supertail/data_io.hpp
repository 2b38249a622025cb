#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "supertail/distributions.hpp"
#include "supertail/rng.hpp"

namespace supertail {

struct CsvOptions {
  char delimiter = ',';
  bool has_header = true;
  double scale = 1.0;  // applied to every value after parsing
  // nonpositive values: reject the file or drop the rows
  enum class NonPositive { reject, drop } nonpositive = NonPositive::reject;
};

namespace detail {
inline std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

inline std::vector<std::string> split_csv_line(const std::string& line,
                                               char delim) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (char ch : line) {
    if (ch == '"') {
      quoted = !quoted;
    } else if (ch == delim && !quoted) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(trim(cur));
  return out;
}
}  // namespace detail

// Reads one numeric column of a CSV file. The column is selected by header
// name when a header row is present, otherwise by zero-based index given as
// a decimal string. Malformed cells are reported with their line number.
inline std::vector<double> load_losses(const std::string& path,
                                       const std::string& column,
                                       const CsvOptions& options = {}) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("load_losses: cannot open " + path);
  std::string line;
  std::size_t line_no = 0;
  std::size_t col_idx = 0;
  bool col_resolved = false;

  if (options.has_header) {
    if (!std::getline(in, line))
      throw std::invalid_argument("load_losses: empty file " + path);
    ++line_no;
    auto cells = detail::split_csv_line(line, options.delimiter);
    for (std::size_t i = 0; i < cells.size(); ++i)
      if (cells[i] == column) {
        col_idx = i;
        col_resolved = true;
      }
    if (!col_resolved)
      throw std::invalid_argument("load_losses: column '" + column +
                                  "' not found in header of " + path);
  } else {
    try {
      col_idx = static_cast<std::size_t>(std::stoul(column));
      col_resolved = true;
    } catch (...) {
      throw std::invalid_argument(
          "load_losses: without a header the column must be a numeric "
          "index");
    }
  }

  std::vector<double> values;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    auto cells = detail::split_csv_line(line, options.delimiter);
    if (col_idx >= cells.size())
      throw std::invalid_argument("load_losses: line " +
                                  std::to_string(line_no) +
                                  ": missing column " + column);
    const std::string& cell = cells[col_idx];
    double v;
    try {
      std::size_t pos = 0;
      v = std::stod(cell, &pos);
      if (pos != cell.size()) throw std::invalid_argument("trailing junk");
    } catch (...) {
      throw std::invalid_argument("load_losses: line " +
                                  std::to_string(line_no) +
                                  ": cannot parse '" + cell + "' as a number");
    }
    if (!std::isfinite(v))
      throw std::invalid_argument("load_losses: line " +
                                  std::to_string(line_no) +
                                  ": non-finite value");
    v *= options.scale;
    if (v <= 0.0) {
      if (options.nonpositive == CsvOptions::NonPositive::reject)
        throw std::invalid_argument("load_losses: line " +
                                    std::to_string(line_no) +
                                    ": nonpositive loss value");
      continue;  // drop
    }
    values.push_back(v);
  }
  if (values.empty())
    throw std::invalid_argument("load_losses: no usable rows in " + path);
  return values;
}

// Distribution whose quantile is the pointwise sum of the two empirical
// left quantiles (perfect positive dependence between the components).
inline LossDistribution comonotonic_sum(const LossDistribution& f1,
                                        const LossDistribution& f2) {
  return LossDistribution::comonotone_sum({f1, f2});
}

// Bootstrap draws of the sum of independent resamples from f1 and f2.
inline std::vector<double> independent_sum(const LossDistribution& f1,
                                           const LossDistribution& f2,
                                           std::size_t n_out,
                                           const RngStream& stream,
                                           unsigned threads = 1) {
  if (n_out == 0) throw std::invalid_argument("independent_sum: n_out == 0");
  std::vector<double> out(n_out);
  for_blocks(n_out, kDefaultBlockSize, threads,
             [&](std::uint64_t, std::uint64_t b0, std::uint64_t b1) {
               for (std::uint64_t i = b0; i < b1; ++i)
                 out[i] = f1.quantile(stream.uniform(2 * i)) +
                          f2.quantile(stream.uniform(2 * i + 1));
             });
  return out;
}

}  // namespace supertail
