#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <string>

namespace lmm {

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LoadedSeries {
  Eigen::MatrixXd y;        // d x (rows)
  std::optional<double> h;  // inferred from the t column when present
};

/**
 * Read an observation series. Accepted layouts:
 *   - header "t,y1,...,yd": the t column must be equidistant (relative
 *     deviation from the median spacing <= 1e-6) and yields h;
 *   - headerless numeric columns: every column is a component, h unknown.
 * Ragged rows, non-numeric cells and jittered timestamps are errors.
 */
LoadedSeries read_observations(const std::string& path);

// Write header t,y1,...,yd and one row per observation at t = i*h,
// full double precision.
void write_observations_csv(const std::string& path, const Eigen::MatrixXd& y, double h);

}  // namespace lmm
