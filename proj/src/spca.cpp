#include "orthostream/spca.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

namespace ortho {

void SpcaProblem::validate() const {
  if (n < 1) throw std::invalid_argument("SpcaProblem: n must be >= 1");
  if (!(lambda >= 0.0)) throw std::invalid_argument("SpcaProblem: lambda must be >= 0");
  if (!(mu > 0.0)) throw std::invalid_argument("SpcaProblem: mu must be > 0");
}

double huber(const Vec& z, double mu) {
  if (!(mu > 0.0)) throw std::invalid_argument("huber: mu must be > 0");
  double acc = 0.0;
  for (Index i = 0; i < z.size(); ++i) {
    const double a = std::abs(z(i));
    acc += a <= mu ? a * a / (2.0 * mu) : a - mu / 2.0;
  }
  return acc;
}

Vec huber_gradient(const Vec& z, double mu) {
  if (!(mu > 0.0)) throw std::invalid_argument("huber_gradient: mu must be > 0");
  Vec g(z.size());
  for (Index i = 0; i < z.size(); ++i) {
    const double a = z(i);
    g(i) = std::abs(a) <= mu ? a / mu : (a > 0.0 ? 1.0 : -1.0);
  }
  return g;
}

Vec spca_sample_gradient(const SpcaProblem& p, const Vec& z, const Mat& samples) {
  if (samples.rows() != z.size()) throw std::invalid_argument("spca_sample_gradient: dimension mismatch");
  if (samples.cols() < 1) throw std::invalid_argument("spca_sample_gradient: empty batch");
  const Eigen::RowVectorXd proj = z.transpose() * samples;
  const Vec data = (-2.0 / static_cast<double>(samples.cols())) * (samples * proj.transpose());
  return p.lambda == 0.0 ? data : Vec(data + p.lambda * huber_gradient(z, p.mu));
}

double spca_sample_objective(const SpcaProblem& p, const Vec& z, const Mat& samples) {
  if (samples.rows() != z.size()) throw std::invalid_argument("spca_sample_objective: dimension mismatch");
  const Eigen::RowVectorXd proj = z.transpose() * samples;
  const double data = -proj.squaredNorm() / static_cast<double>(samples.cols());
  return p.lambda == 0.0 ? data : data + p.lambda * huber(z, p.mu);
}

Vec unit_ball_lmo(const Vec& g, UnitBallLmoLog* log) {
  const double len = g.norm();
  if (len == 0.0) {
    if (log) ++log->zero_gradient_events;
    std::cerr << "unit_ball_lmo: zero gradient, returning e1\n";
    return Vec::Unit(g.size(), 0);
  }
  return -g / len;
}

ProblemOracle spca_oracle(const SpcaProblem& problem, std::shared_ptr<UnitBallLmoLog> log) {
  problem.validate();
  if (!log) log = std::make_shared<UnitBallLmoLog>();
  ProblemOracle o;
  o.sample_gradient = [problem](const Mat& z, const MiniBatch& b) -> Mat {
    return spca_sample_gradient(problem, z.col(0), b.samples);
  };
  o.sample_objective = [problem](const Mat& z, const MiniBatch& b) {
    return spca_sample_objective(problem, z.col(0), b.samples);
  };
  o.lmo = [log](const Mat& g) -> Mat { return unit_ball_lmo(g.col(0), log.get()); };
  o.contains = [](const Mat& z, double tolerance) {
    return z.cols() == 1 && z.allFinite() && z.norm() <= 1.0 + tolerance;
  };
  return o;
}

SpcaModel SpcaModel::make(Index n, Index q, std::uint64_t seed, double leading) {
  if (n < 1 || q < 1 || q > n) throw std::invalid_argument("SpcaModel: need 1 <= q <= n");
  Rng rng(mix_seed(seed, 0x5bca0001));
  SpcaModel m;
  m.q = q;
  m.seed = seed;
  m.spectrum = Vec::Ones(n);
  m.spectrum(0) = leading;

  Vec v1 = Vec::Zero(n);
  v1.head(q).setConstant(1.0 / std::sqrt(static_cast<double>(q)));

  Mat v(n, n);
  for (;;) {
    v.col(0) = v1;
    for (Index j = 1; j < n; ++j) v.col(j) = random_unit_vector(n, rng);
    Eigen::FullPivLU<Mat> lu(v);
    if (lu.rank() == n) break;
  }
  // modified Gram-Schmidt; column 0 is already unit length and stays put
  for (Index j = 1; j < n; ++j) {
    for (Index k = 0; k < j; ++k) v.col(j) -= v.col(k).dot(v.col(j)) * v.col(k);
    v.col(j).normalize();
  }
  // second pass for orthogonality at the 1e-15 level
  for (Index j = 1; j < n; ++j) {
    for (Index k = 0; k < j; ++k) v.col(j) -= v.col(k).dot(v.col(j)) * v.col(k);
    v.col(j).normalize();
  }
  m.v = std::move(v);
  return m;
}

CovarianceStream::CovarianceStream(const SpcaModel& model, Index batch_size, std::size_t total_batches)
    : factor_(model.v * model.spectrum.cwiseSqrt().asDiagonal()),
      batch_size_(batch_size),
      total_(total_batches),
      rng_(mix_seed(model.seed, 0x5bca0002)) {
  if (batch_size_ < 1) throw std::invalid_argument("CovarianceStream: batch_size must be >= 1");
}

std::optional<MiniBatch> CovarianceStream::next() {
  if (emitted_ >= total_) return std::nullopt;
  ++emitted_;
  return MiniBatch{emitted_, factor_ * gaussian_matrix(factor_.cols(), batch_size_, rng_)};
}

double spca_recovery_error(const Vec& z, const Vec& v1) {
  if (z.size() != v1.size()) throw std::invalid_argument("spca_recovery_error: dimension mismatch");
  return std::abs(1.0 - std::abs(z.dot(v1)));
}

}  // namespace ortho
