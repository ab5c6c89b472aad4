#include "orthostream/montecarlo.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "orthostream/rng.hpp"
#include "orthostream/stream.hpp"

namespace ortho::mc {

std::size_t Plan::chunk_size(std::size_t c) const {
  const std::size_t start = c * chunk;
  return start >= samples ? 0 : std::min(chunk, samples - start);
}

double ScalarMoments::stderr_of_mean() const {
  return count > 0 ? std::sqrt(variance() / static_cast<double>(count)) : 0.0;
}

Mat MatrixMoments::variance() const {
  if (count < 2) return Mat::Zero(mean.rows(), mean.cols());
  return m2 / static_cast<double>(count - 1);
}

Mat MatrixMoments::stderr_of_mean() const {
  if (count == 0) return Mat::Zero(mean.rows(), mean.cols());
  return (variance() / static_cast<double>(count)).cwiseSqrt();
}

Mat draw_chunk(const BgSampler& sampler, const Plan& plan, std::size_t c) {
  Rng rng(mix_seed(plan.seed, c));
  const auto cols = static_cast<Index>(plan.chunk_size(c));
  return sampler.d_true * sample_bernoulli_gaussian(sampler.dim(), sampler.theta, cols, rng);
}

ScalarMoments merge(const ScalarMoments& a, const ScalarMoments& b) {
  if (a.count == 0) return b;
  if (b.count == 0) return a;
  const auto na = static_cast<double>(a.count), nb = static_cast<double>(b.count);
  const double n = na + nb;
  const double delta = b.mean - a.mean;
  return {a.mean + delta * nb / n, a.m2 + b.m2 + delta * delta * na * nb / n, a.count + b.count};
}

MatrixMoments merge(const MatrixMoments& a, const MatrixMoments& b) {
  if (a.count == 0) return b;
  if (b.count == 0) return a;
  const auto na = static_cast<double>(a.count), nb = static_cast<double>(b.count);
  const double n = na + nb;
  const Mat delta = b.mean - a.mean;
  return {a.mean + delta * (nb / n), a.m2 + b.m2 + delta.cwiseProduct(delta) * (na * nb / n),
          a.count + b.count};
}

namespace {

void check_plan(const Plan& plan, const BgSampler& sampler, const Mat& d) {
  if (plan.samples == 0 || plan.chunk == 0) throw std::invalid_argument("mc: plan needs samples > 0 and chunk > 0");
  if (d.rows() != sampler.dim() || d.cols() != sampler.dim())
    throw std::invalid_argument("mc: dictionary and sampler dimensions differ");
}

// Row vector of per-sample objective values -sum_k |z_k|^p for the columns of y.
Eigen::RowVectorXd per_sample_objective(const Mat& d, Objective obj, const Mat& y) {
  const Mat z = d.transpose() * y;
  if (obj == Objective::L3) return -z.array().abs().cube().colwise().sum().matrix();
  return -z.array().square().square().colwise().sum().matrix();
}

ScalarMoments summarize(const Eigen::RowVectorXd& v) {
  ScalarMoments m;
  m.count = static_cast<std::size_t>(v.size());
  if (m.count == 0) return m;
  m.mean = v.mean();
  m.m2 = (v.array() - m.mean).square().sum();
  return m;
}

template <class ChunkFn>
auto reduce_chunks_parallel(std::size_t chunks, ChunkFn&& fn) {
  using Result = decltype(fn(std::size_t{0}));
  std::vector<Result> parts(chunks);
#pragma omp parallel for schedule(static)
  for (long c = 0; c < static_cast<long>(chunks); ++c) parts[static_cast<std::size_t>(c)] = fn(static_cast<std::size_t>(c));
  Result total{};
  for (const auto& p : parts) total = merge(total, p);
  return total;
}

double scale_factor(const OdlProblem& p) {
  if (p.gradient_scale == GradientScale::PaperFormula) return 1.0;
  return p.objective == Objective::L3 ? 3.0 : 4.0;
}

}  // namespace

namespace parallel {

ScalarMoments objective(const Mat& d, Objective obj, const BgSampler& sampler, const Plan& plan) {
  check_plan(plan, sampler, d);
  return reduce_chunks_parallel(plan.chunk_count(), [&](std::size_t c) {
    return summarize(per_sample_objective(d, obj, draw_chunk(sampler, plan, c)));
  });
}

ScalarMoments objective_difference(const Mat& a, const Mat& b, Objective obj, const BgSampler& sampler,
                                   const Plan& plan) {
  check_plan(plan, sampler, a);
  check_plan(plan, sampler, b);
  return reduce_chunks_parallel(plan.chunk_count(), [&](std::size_t c) {
    const Mat y = draw_chunk(sampler, plan, c);
    return summarize(per_sample_objective(a, obj, y) - per_sample_objective(b, obj, y));
  });
}

MatrixMoments gradient(const Mat& d, const OdlProblem& problem, const BgSampler& sampler, const Plan& plan) {
  check_plan(plan, sampler, d);
  const double factor = scale_factor(problem);
  return reduce_chunks_parallel(plan.chunk_count(), [&](std::size_t c) {
    const Mat y = draw_chunk(sampler, plan, c);
    const Mat z = d.transpose() * y;
    const Mat w = problem.objective == Objective::L3 ? Mat((z.array().abs() * z.array()).matrix())
                                                     : Mat(z.array().cube().matrix());
    const auto m = static_cast<double>(y.cols());
    // per-sample gradient is -factor * y_j w_j^T
    MatrixMoments out;
    out.count = static_cast<std::size_t>(y.cols());
    out.mean = (-factor / m) * (y * w.transpose());
    const Mat sumsq = (factor * factor) * (y.cwiseProduct(y) * w.cwiseProduct(w).transpose());
    out.m2 = (sumsq - m * out.mean.cwiseProduct(out.mean)).cwiseMax(0.0);
    return out;
  });
}

}  // namespace parallel

namespace serial {

namespace {

double sample_value(const Mat& d, Objective obj, const Mat& y, Index j) {
  const Index n = d.rows();
  double acc = 0.0;
  for (Index k = 0; k < n; ++k) {
    double z = 0.0;
    for (Index i = 0; i < n; ++i) z += d(i, k) * y(i, j);
    const double a = std::abs(z);
    acc += obj == Objective::L3 ? a * a * a : a * a * a * a;
  }
  return -acc;
}

struct Welford {
  double mean = 0.0, m2 = 0.0;
  std::size_t count = 0;
  void add(double v) {
    ++count;
    const double delta = v - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (v - mean);
  }
};

}  // namespace

ScalarMoments objective(const Mat& d, Objective obj, const BgSampler& sampler, const Plan& plan) {
  check_plan(plan, sampler, d);
  ScalarMoments total;
  for (std::size_t c = 0; c < plan.chunk_count(); ++c) {
    const Mat y = draw_chunk(sampler, plan, c);
    Welford w;
    for (Index j = 0; j < y.cols(); ++j) w.add(sample_value(d, obj, y, j));
    total = merge(total, ScalarMoments{w.mean, w.m2, w.count});
  }
  return total;
}

ScalarMoments objective_difference(const Mat& a, const Mat& b, Objective obj, const BgSampler& sampler,
                                   const Plan& plan) {
  check_plan(plan, sampler, a);
  check_plan(plan, sampler, b);
  ScalarMoments total;
  for (std::size_t c = 0; c < plan.chunk_count(); ++c) {
    const Mat y = draw_chunk(sampler, plan, c);
    Welford w;
    for (Index j = 0; j < y.cols(); ++j) w.add(sample_value(a, obj, y, j) - sample_value(b, obj, y, j));
    total = merge(total, ScalarMoments{w.mean, w.m2, w.count});
  }
  return total;
}

MatrixMoments gradient(const Mat& d, const OdlProblem& problem, const BgSampler& sampler, const Plan& plan) {
  check_plan(plan, sampler, d);
  const Index n = d.rows();
  const double factor = scale_factor(problem);
  MatrixMoments total;
  std::vector<double> w(static_cast<std::size_t>(n));
  for (std::size_t c = 0; c < plan.chunk_count(); ++c) {
    const Mat y = draw_chunk(sampler, plan, c);
    Mat mean = Mat::Zero(n, n), m2 = Mat::Zero(n, n);
    std::size_t count = 0;
    for (Index j = 0; j < y.cols(); ++j) {
      for (Index k = 0; k < n; ++k) {
        double z = 0.0;
        for (Index i = 0; i < n; ++i) z += d(i, k) * y(i, j);
        w[static_cast<std::size_t>(k)] = problem.objective == Objective::L3 ? std::abs(z) * z : z * z * z;
      }
      ++count;
      for (Index k = 0; k < n; ++k) {
        for (Index i = 0; i < n; ++i) {
          const double g = -factor * y(i, j) * w[static_cast<std::size_t>(k)];
          const double delta = g - mean(i, k);
          mean(i, k) += delta / static_cast<double>(count);
          m2(i, k) += delta * (g - mean(i, k));
        }
      }
    }
    total = merge(total, MatrixMoments{mean, m2, count});
  }
  return total;
}

}  // namespace serial

}  // namespace ortho::mc
