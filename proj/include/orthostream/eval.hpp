#ifndef ORTHOSTREAM_EVAL_HPP
#define ORTHOSTREAM_EVAL_HPP

#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "orthostream/matops.hpp"

namespace ortho {

/// |1 - ||d_t^T d_true||_4^4 / N| with the entrywise fourth-power sum.
double recovery_error(const Mat& d_t, const Mat& d_true);

/// Keeps the eta largest-magnitude entries; ties keep the lower index.
Vec hard_threshold(const Vec& a, Index eta);

struct SparseCode {
  Vec code;
  Vec y_hat;
};

/// code = hard_threshold(d^T y, eta), y_hat = d code.
SparseCode sparse_code_and_reconstruct(const Mat& d, const Vec& y, Index eta);

/// Running sums for sqrt(sum ||y_hat - y||^2 / sum ||y||^2).
class RmseAccumulator {
 public:
  void add(const Vec& y_hat, const Vec& y);
  void add_squared(double residual_sq, double reference_sq);
  /// Throws std::domain_error when nothing was added or every y is zero.
  double value() const;
  double residual_sq() const { return residual_; }
  double reference_sq() const { return reference_; }
  std::size_t count() const { return count_; }

 private:
  double residual_ = 0.0;
  double reference_ = 0.0;
  std::size_t count_ = 0;
};

double rmse(const std::vector<Vec>& y_hat, const std::vector<Vec>& y);

inline Index compression_ratio(Index n, Index eta) { return eta > 0 ? n / eta : 0; }

struct HlndmReport {
  double statistic = 0.0;
  Index h = 4;
  std::size_t T = 0;
  double mean_difference = 0.0;  // mean of d_t
  double long_run_variance = 0.0;
  double alpha = 0.05;
  double z_critical = 1.96;
  bool reject_at_5pct = false;
  bool degenerate = false;

  nlohmann::json to_json() const;
};

/// Harvey-Leybourne-Newbold corrected Diebold-Mariano statistic on
/// d_t = rmse1_t^2 - rmse2_t^2. d-bar is the mean over T. The long-run
/// variance sums autocovariances for lags |k| <= h - 1, so h = 1 keeps lag 0
/// only. When that variance is <= 0 (or the small-sample factor is not
/// positive) the statistic is reported as 0 with degenerate = true.
HlndmReport hlndm(const std::vector<double>& rmse1, const std::vector<double>& rmse2, Index h = 4);

/// Trial-averaged curve of a metric with its standard error.
struct Curve {
  std::vector<std::size_t> t;
  std::vector<double> mean;
  std::vector<double> stderr_;
};

/// series[k][i] is the value of trial k at time t[i]. NaNs are skipped.
Curve average_curves(const std::vector<std::size_t>& t, const std::vector<std::vector<double>>& series);
std::string curve_to_csv(const Curve& c, const std::string& value_name = "mean_error");

}  // namespace ortho

#endif  // ORTHOSTREAM_EVAL_HPP
