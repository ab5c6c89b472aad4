#include "orthostream/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace ortho {

double recovery_error(const Mat& d_t, const Mat& d_true) {
  if (d_t.rows() != d_t.cols() || d_t.rows() != d_true.rows() || d_t.cols() != d_true.cols())
    throw std::invalid_argument("recovery_error: d_t and d_true must be square and the same shape");
  const Mat w = d_t.transpose() * d_true;
  return std::abs(1.0 - entrywise_power_sum(w, 4.0) / static_cast<double>(d_t.rows()));
}

Vec hard_threshold(const Vec& a, Index eta) {
  if (eta < 1 || eta > a.size()) {
    std::ostringstream msg;
    msg << "hard_threshold: eta=" << eta << " outside [1, " << a.size() << "]";
    throw std::invalid_argument(msg.str());
  }
  std::vector<Index> order(static_cast<std::size_t>(a.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index i, Index j) { return std::abs(a(i)) > std::abs(a(j)); });
  Vec out = Vec::Zero(a.size());
  for (Index k = 0; k < eta; ++k) out(order[static_cast<std::size_t>(k)]) = a(order[static_cast<std::size_t>(k)]);
  return out;
}

SparseCode sparse_code_and_reconstruct(const Mat& d, const Vec& y, Index eta) {
  if (d.rows() != d.cols() || d.rows() != y.size())
    throw std::invalid_argument("sparse_code_and_reconstruct: dimension mismatch");
  SparseCode sc;
  sc.code = hard_threshold(d.transpose() * y, eta);
  sc.y_hat = d * sc.code;
  return sc;
}

void RmseAccumulator::add(const Vec& y_hat, const Vec& y) {
  if (y_hat.size() != y.size()) throw std::invalid_argument("rmse: y_hat and y differ in length");
  add_squared((y_hat - y).squaredNorm(), y.squaredNorm());
}

void RmseAccumulator::add_squared(double residual_sq, double reference_sq) {
  residual_ += residual_sq;
  reference_ += reference_sq;
  ++count_;
}

double RmseAccumulator::value() const {
  if (count_ == 0) throw std::domain_error("rmse: no samples");
  if (!(reference_ > 0.0)) throw std::domain_error("rmse: reference signals are all zero");
  return std::sqrt(residual_ / reference_);
}

double rmse(const std::vector<Vec>& y_hat, const std::vector<Vec>& y) {
  if (y_hat.size() != y.size()) throw std::invalid_argument("rmse: sequence lengths differ");
  RmseAccumulator acc;
  for (std::size_t i = 0; i < y.size(); ++i) acc.add(y_hat[i], y[i]);
  return acc.value();
}

nlohmann::json HlndmReport::to_json() const {
  return {{"statistic", statistic},
          {"h", h},
          {"T", T},
          {"mean_difference", mean_difference},
          {"long_run_variance", long_run_variance},
          {"alpha", alpha},
          {"z_critical", z_critical},
          {"reject_at_5pct", reject_at_5pct},
          {"degenerate", degenerate},
          {"mean_convention", "d_bar is the average of d_t over T"},
          {"h1_kernel", "only lag 0 contributes when h = 1"}};
}

HlndmReport hlndm(const std::vector<double>& rmse1, const std::vector<double>& rmse2, Index h) {
  if (rmse1.size() != rmse2.size()) throw std::invalid_argument("hlndm: series lengths differ");
  if (h < 1) throw std::invalid_argument("hlndm: h must be >= 1");
  const std::size_t T = rmse1.size();
  if (T <= static_cast<std::size_t>(2 * h)) throw std::invalid_argument("hlndm: need T > 2h");

  HlndmReport r;
  r.h = h;
  r.T = T;
  std::vector<double> d(T);
  for (std::size_t i = 0; i < T; ++i) d[i] = rmse1[i] * rmse1[i] - rmse2[i] * rmse2[i];
  const double Td = static_cast<double>(T);
  const double dbar = std::accumulate(d.begin(), d.end(), 0.0) / Td;
  r.mean_difference = dbar;

  auto autocov = [&](std::size_t k) {
    double acc = 0.0;
    for (std::size_t t = k; t < T; ++t) acc += (d[t] - dbar) * (d[t - k] - dbar);
    return acc / Td;
  };
  double f = autocov(0);
  for (Index k = 1; k <= h - 1; ++k) f += 2.0 * autocov(static_cast<std::size_t>(k));
  r.long_run_variance = f;

  const double hd = static_cast<double>(h);
  const double correction = (Td - 1.0 - 2.0 * hd + hd * (hd - 1.0)) / Td;
  if (!(f > 0.0) || !(correction > 0.0)) {
    r.degenerate = true;
    r.statistic = 0.0;
    return r;
  }
  r.statistic = std::sqrt(correction) * dbar / std::sqrt(f / Td);
  r.reject_at_5pct = std::abs(r.statistic) > r.z_critical;
  return r;
}

Curve average_curves(const std::vector<std::size_t>& t, const std::vector<std::vector<double>>& series) {
  Curve c;
  c.t = t;
  c.mean.assign(t.size(), std::nan(""));
  c.stderr_.assign(t.size(), std::nan(""));
  for (std::size_t i = 0; i < t.size(); ++i) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& s : series) {
      if (i >= s.size()) throw std::invalid_argument("average_curves: series shorter than t");
      if (std::isnan(s[i])) continue;
      sum += s[i];
      ++n;
    }
    if (n == 0) continue;
    const double m = sum / static_cast<double>(n);
    double ss = 0.0;
    for (const auto& s : series)
      if (!std::isnan(s[i])) ss += (s[i] - m) * (s[i] - m);
    c.mean[i] = m;
    c.stderr_[i] = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n)) : 0.0;
  }
  return c;
}

std::string curve_to_csv(const Curve& c, const std::string& value_name) {
  std::ostringstream out;
  out.precision(17);
  out << "t," << value_name << ",stderr\n";
  for (std::size_t i = 0; i < c.t.size(); ++i) {
    out << c.t[i] << ',';
    if (!std::isnan(c.mean[i])) out << c.mean[i];
    out << ',';
    if (!std::isnan(c.stderr_[i])) out << c.stderr_[i];
    out << '\n';
  }
  return out.str();
}

}  // namespace ortho
