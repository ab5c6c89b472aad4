#ifndef ORTHOSTREAM_SPCA_HPP
#define ORTHOSTREAM_SPCA_HPP

#include <cstddef>
#include <cstdint>
#include <memory>

#include <json.hpp>

#include "orthostream/fw_core.hpp"
#include "orthostream/matops.hpp"
#include "orthostream/rng.hpp"
#include "orthostream/stream.hpp"

namespace ortho {

/// Single-unit sparse PCA over the unit ball:
/// minimize E[-z^T y y^T z + lambda H_mu(z)].
struct SpcaProblem {
  Index n = 0;
  double lambda = 1.0;
  double mu = 0.2;

  void validate() const;
};

/// Smooth-l1 Huber penalty: a^2/(2 mu) for |a| <= mu, |a| - mu/2 otherwise,
/// summed over entries.
double huber(const Vec& z, double mu);
Vec huber_gradient(const Vec& z, double mu);

/// Batch mean of -2 (y^T z) y + lambda grad H_mu(z).
Vec spca_sample_gradient(const SpcaProblem& p, const Vec& z, const Mat& samples);
/// Batch mean of -(z^T y)^2 + lambda H_mu(z).
double spca_sample_objective(const SpcaProblem& p, const Vec& z, const Mat& samples);

struct UnitBallLmoLog {
  std::size_t zero_gradient_events = 0;
};

/// -g / ||g||_2; the first basis vector when g = 0.
Vec unit_ball_lmo(const Vec& g, UnitBallLmoLog* log = nullptr);

/// Oracle over n x 1 iterates. The update map is the identity.
ProblemOracle spca_oracle(const SpcaProblem& problem, std::shared_ptr<UnitBallLmoLog> log = nullptr);

/// Covariance V diag(spectrum) V^T with a q-sparse leading eigenvector
/// v1 = (1/sqrt(q), ..., 1/sqrt(q), 0, ..., 0).
struct SpcaModel {
  Mat v;         // orthogonal, first column v1
  Vec spectrum;  // (leading, 1, ..., 1)
  Index q = 0;
  std::uint64_t seed = 0;

  Index n() const { return v.rows(); }
  Vec v1() const { return v.col(0); }
  Mat covariance() const { return v * spectrum.asDiagonal() * v.transpose(); }

  /// Draws v2..vn uniformly from the sphere until [v1 v2 ... vn] has full
  /// rank, then Gram-Schmidt orthogonalizes starting from v1.
  static SpcaModel make(Index n, Index q, std::uint64_t seed, double leading = 100.0);
};

/// y = V diag(spectrum)^{1/2} g with g standard normal.
class CovarianceStream final : public BatchSource {
 public:
  CovarianceStream(const SpcaModel& model, Index batch_size, std::size_t total_batches);
  std::optional<MiniBatch> next() override;

 private:
  Mat factor_;
  Index batch_size_;
  std::size_t total_;
  std::size_t emitted_ = 0;
  Rng rng_;
};

/// |1 - |z^T v1||.
double spca_recovery_error(const Vec& z, const Vec& v1);

}  // namespace ortho

#endif  // ORTHOSTREAM_SPCA_HPP
