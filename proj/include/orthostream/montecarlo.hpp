#ifndef ORTHOSTREAM_MONTECARLO_HPP
#define ORTHOSTREAM_MONTECARLO_HPP

#include <cstddef>
#include <cstdint>

#include "orthostream/matops.hpp"
#include "orthostream/odl.hpp"

namespace ortho::mc {

// Monte-Carlo reference estimates of the expected ODL objective and
// gradient under y = d_true x, x ~ BG(theta).
//
// Samples are drawn in fixed-size chunks; chunk c uses the generator seeded
// with mix_seed(plan.seed, c), so the sample set depends only on the plan.
// Chunk statistics are merged in chunk order, which keeps the OpenMP kernels
// bitwise reproducible for any thread count. The serial namespace holds
// per-sample scalar-loop versions over the same samples, kept as the
// reference for the parallel kernels.

struct BgSampler {
  Mat d_true;
  double theta = 0.3;

  Index dim() const { return d_true.rows(); }
};

struct Plan {
  std::size_t samples = 20000;
  std::uint64_t seed = 0;
  std::size_t chunk = 1024;

  std::size_t chunk_count() const { return chunk == 0 ? 0 : (samples + chunk - 1) / chunk; }
  std::size_t chunk_size(std::size_t c) const;
};

struct ScalarMoments {
  double mean = 0.0;
  double m2 = 0.0;  // sum of squared deviations
  std::size_t count = 0;

  double variance() const { return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0; }
  double stderr_of_mean() const;
};

struct MatrixMoments {
  Mat mean;
  Mat m2;
  std::size_t count = 0;

  Mat variance() const;
  Mat stderr_of_mean() const;
};

/// Samples of chunk c as an n x chunk_size(c) matrix.
Mat draw_chunk(const BgSampler& sampler, const Plan& plan, std::size_t c);

/// Chan et al. pairwise merge of two moment summaries.
ScalarMoments merge(const ScalarMoments& a, const ScalarMoments& b);
MatrixMoments merge(const MatrixMoments& a, const MatrixMoments& b);

namespace parallel {
/// Per-sample objective -||d^T y||_p^p.
ScalarMoments objective(const Mat& d, Objective obj, const BgSampler& sampler, const Plan& plan);
/// Per-sample f(a, y) - f(b, y) over common samples.
ScalarMoments objective_difference(const Mat& a, const Mat& b, Objective obj, const BgSampler& sampler,
                                   const Plan& plan);
/// Per-sample gradient, with the problem's objective and scale.
MatrixMoments gradient(const Mat& d, const OdlProblem& problem, const BgSampler& sampler, const Plan& plan);
}  // namespace parallel

namespace serial {
ScalarMoments objective(const Mat& d, Objective obj, const BgSampler& sampler, const Plan& plan);
ScalarMoments objective_difference(const Mat& a, const Mat& b, Objective obj, const BgSampler& sampler,
                                   const Plan& plan);
MatrixMoments gradient(const Mat& d, const OdlProblem& problem, const BgSampler& sampler, const Plan& plan);
}  // namespace serial

}  // namespace ortho::mc

#endif  // ORTHOSTREAM_MONTECARLO_HPP
