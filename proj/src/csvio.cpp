#include "lmm/csvio.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace lmm {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

bool parse_number(const std::string& cell, double& out) {
  if (cell.empty()) return false;
  char* end = nullptr;
  out = std::strtod(cell.c_str(), &end);
  return end == cell.c_str() + cell.size();
}

}  // namespace

LoadedSeries read_observations(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);

  std::vector<std::vector<double>> rows;
  bool has_t_column = false;
  std::string line;
  long lineno = 0;
  std::size_t width = 0;

  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto cells = split_csv(line);

    if (rows.empty() && lineno == 1) {
      double tmp;
      const bool numeric = std::ranges::all_of(
          cells, [&](const std::string& c) { return parse_number(c, tmp); });
      if (!numeric) {
        std::string head = cells.empty() ? "" : cells[0];
        std::ranges::transform(head, head.begin(),
                               [](unsigned char c) { return std::tolower(c); });
        if (head != "t")
          throw DataError(path + ": unsupported header (expected t,y1,...,yd)");
        has_t_column = true;
        width = cells.size();
        if (width < 2) throw DataError(path + ": header has no data columns");
        continue;
      }
    }

    if (width == 0) width = cells.size();
    if (cells.size() != width)
      throw DataError(path + ":" + std::to_string(lineno) + ": ragged row (" +
                      std::to_string(cells.size()) + " cells, expected " +
                      std::to_string(width) + ")");
    std::vector<double> row(width);
    for (std::size_t c = 0; c < width; ++c) {
      if (!parse_number(cells[c], row[c]))
        throw DataError(path + ":" + std::to_string(lineno) + ": non-numeric cell '" +
                        cells[c] + "'");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError(path + ": no data rows");

  LoadedSeries out;
  const std::size_t d = has_t_column ? width - 1 : width;
  const std::size_t start = has_t_column ? 1 : 0;
  out.y.resize(static_cast<long>(d), static_cast<long>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t c = 0; c < d; ++c)
      out.y(static_cast<long>(c), static_cast<long>(i)) = rows[i][start + c];

  if (has_t_column) {
    if (rows.size() < 2) throw DataError(path + ": need at least 2 rows to infer h");
    std::vector<double> diffs(rows.size() - 1);
    for (std::size_t i = 0; i + 1 < rows.size(); ++i)
      diffs[i] = rows[i + 1][0] - rows[i][0];
    std::vector<double> sorted = diffs;
    std::ranges::sort(sorted);
    const double median = sorted[sorted.size() / 2];
    if (!(median > 0.0)) throw DataError(path + ": t column is not increasing");
    for (std::size_t i = 0; i < diffs.size(); ++i) {
      if (std::abs(diffs[i] - median) > 1e-6 * std::abs(median))
        throw DataError(path + ": non-equidistant timestamps near row " +
                        std::to_string(i + 2) + " (spacing " + std::to_string(diffs[i]) +
                        " vs median " + std::to_string(median) + ")");
    }
    out.h = median;
  }
  return out;
}

void write_observations_csv(const std::string& path, const Eigen::MatrixXd& y, double h) {
  std::ofstream outf(path);
  if (!outf) throw DataError("cannot write " + path);
  outf << "t";
  for (long l = 0; l < y.rows(); ++l) outf << ",y" << (l + 1);
  outf << "\n";
  char buf[64];
  for (long i = 0; i < y.cols(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", static_cast<double>(i) * h);
    outf << buf;
    for (long l = 0; l < y.rows(); ++l) {
      std::snprintf(buf, sizeof(buf), "%.17g", y(l, i));
      outf << "," << buf;
    }
    outf << "\n";
  }
  if (!outf) throw DataError("write failed for " + path);
}

}  // namespace lmm
