#include <doctest.h>

#include <cmath>

#include "orthostream/rng.hpp"
#include "orthostream/spca.hpp"

using namespace ortho;

namespace {

double objective_direct(const SpcaProblem& p, const Vec& z, const Mat& y) {
  double acc = 0.0;
  for (Index j = 0; j < y.cols(); ++j) {
    const double a = z.dot(y.col(j));
    acc -= a * a;
  }
  acc /= static_cast<double>(y.cols());
  for (Index i = 0; i < z.size(); ++i) {
    const double a = std::abs(z(i));
    acc += p.lambda * (a <= p.mu ? a * a / (2 * p.mu) : a - p.mu / 2);
  }
  return acc;
}

}  // namespace

TEST_CASE("huber values") {
  CHECK(huber(Vec::Zero(4), 0.2) == 0.0);
  Vec z(1);
  z << 0.2;
  CHECK(huber(z, 0.2) == doctest::Approx(0.1));
  z << -1.0;
  CHECK(huber(z, 0.2) == doctest::Approx(0.9));
  z << 0.1;
  CHECK(huber(z, 0.2) == doctest::Approx(0.025));
  CHECK_THROWS(huber(z, 0.0));
  CHECK_THROWS(huber_gradient(z, -1.0));
}

TEST_CASE("huber gradient matches finite differences away from the kink") {
  Rng rng(3);
  for (int i = 0; i < 20; ++i) {
    const Vec z = gaussian_vector(8, rng) * 0.3;
    const Vec g = huber_gradient(z, 0.2);
    const double h = 1e-7;
    Vec fd(8);
    for (Index k = 0; k < 8; ++k) {
      Vec p = z, m = z;
      p(k) += h;
      m(k) -= h;
      fd(k) = (huber(p, 0.2) - huber(m, 0.2)) / (2 * h);
    }
    CHECK((fd - g).norm() / g.norm() < 1e-6);
  }
}

TEST_CASE("single-sample data gradient") {
  Rng rng(4);
  const SpcaProblem p{5, 0.0, 0.2};
  const Vec z = gaussian_vector(5, rng), y = gaussian_vector(5, rng);
  const Vec g = spca_sample_gradient(p, z, y);
  CHECK((g + 2.0 * y.dot(z) * y).norm() < 1e-13);
  const double h = 1e-6;
  Vec fd(5);
  for (Index k = 0; k < 5; ++k) {
    Vec a = z, b = z;
    a(k) += h;
    b(k) -= h;
    fd(k) = (-std::pow(a.dot(y), 2) + std::pow(b.dot(y), 2)) / (2 * h);
  }
  CHECK((fd - g).norm() / g.norm() < 1e-6);
}

TEST_CASE("full spca objective and gradient") {
  Rng rng(6);
  const SpcaProblem p{6, 1.0, 0.2};
  for (int i = 0; i < 10; ++i) {
    const Vec z = gaussian_vector(6, rng) * 0.4;
    const Mat y = gaussian_matrix(6, 4, rng);
    CHECK(spca_sample_objective(p, z, y) == doctest::Approx(objective_direct(p, z, y)).epsilon(1e-12));
    const Vec g = spca_sample_gradient(p, z, y);
    Vec fd(6);
    const double h = 1e-7;
    for (Index k = 0; k < 6; ++k) {
      Vec a = z, b = z;
      a(k) += h;
      b(k) -= h;
      fd(k) = (objective_direct(p, a, y) - objective_direct(p, b, y)) / (2 * h);
    }
    CHECK((fd - g).norm() / g.norm() < 1e-5);
  }
}

TEST_CASE("unit-ball LMO") {
  Rng rng(7);
  for (int i = 0; i < 20; ++i) {
    const Vec g = gaussian_vector(5, rng);
    const Vec s = unit_ball_lmo(g);
    CHECK(s.norm() == doctest::Approx(1.0));
    CHECK(g.dot(s) == doctest::Approx(-g.norm()));
  }
  UnitBallLmoLog log;
  const Vec e = unit_ball_lmo(Vec::Zero(4), &log);
  CHECK((e - Vec::Unit(4, 0)).norm() == 0.0);
  CHECK(log.zero_gradient_events == 1);
}

TEST_CASE("spca oracle wiring") {
  const ProblemOracle o = spca_oracle({4, 1.0, 0.2});
  CHECK_FALSE(o.update_map);
  CHECK(o.contains(Vec::Unit(4, 1), 1e-8));
  CHECK_FALSE(o.contains(Vec::Constant(4, 1.0), 1e-8));
  CHECK_THROWS(spca_oracle({4, -1.0, 0.2}));
  CHECK_THROWS(spca_oracle({4, 1.0, 0.0}));
}

TEST_CASE("spca model construction") {
  const SpcaModel m = SpcaModel::make(20, 3, 9);
  CHECK(orthogonality_defect(m.v) < tol::orthogonality);
  const Vec v1 = m.v1();
  for (Index i = 0; i < 20; ++i) {
    if (i < 3) CHECK(v1(i) == 1.0 / std::sqrt(3.0));
    else CHECK(v1(i) == 0.0);
  }
  CHECK(m.spectrum(0) == 100.0);
  CHECK((m.spectrum.tail(19) - Vec::Ones(19)).norm() == 0.0);
  CHECK_THROWS(SpcaModel::make(5, 6, 1));
  CHECK_THROWS(SpcaModel::make(5, 0, 1));
}

TEST_CASE("covariance stream moments") {
  const SpcaModel m = SpcaModel::make(6, 2, 10);
  CovarianceStream s(m, 100000, 1);
  const Mat y = s.next()->samples;
  CHECK_FALSE(s.next());
  const Mat emp = y * y.transpose() / static_cast<double>(y.cols());
  const Mat sigma = m.covariance();
  // Var(y_i y_j) = S_ii S_jj + S_ij^2 for zero-mean Gaussians
  for (Index i = 0; i < 6; ++i)
    for (Index j = 0; j < 6; ++j) {
      const double sd = std::sqrt(sigma(i, i) * sigma(j, j) + sigma(i, j) * sigma(i, j));
      CHECK(std::abs(emp(i, j) - sigma(i, j)) <= 3.5 * sd / std::sqrt(100000.0));
    }
  const Eigen::RowVectorXd proj = m.v1().transpose() * y;
  const double var1 = proj.squaredNorm() / static_cast<double>(y.cols());
  CHECK(std::abs(var1 - 100.0) <= 3.0 * 100.0 * std::sqrt(2.0 / 100000.0));

  const SpcaModel iso = SpcaModel::make(4, 4, 2, 1.0);
  CovarianceStream si(iso, 50000, 1);
  const Mat yi = si.next()->samples;
  CHECK((yi * yi.transpose() / 50000.0 - Mat::Identity(4, 4)).cwiseAbs().maxCoeff() < 0.03);

  CovarianceStream a(m, 3, 2), b(m, 3, 2);
  CHECK((a.next()->samples - b.next()->samples).norm() == 0.0);
}

TEST_CASE("spca recovery error") {
  const Vec v = Vec::Unit(5, 2);
  CHECK(spca_recovery_error(v, v) == 0.0);
  CHECK(spca_recovery_error(-v, v) == 0.0);
  CHECK(spca_recovery_error(Vec::Unit(5, 0), v) == 1.0);
  Rng rng(1);
  const Vec z = gaussian_vector(5, rng);
  CHECK(spca_recovery_error(z, v) == spca_recovery_error(-z, v));
}

TEST_CASE("unregularized spca recovers the leading eigenvector") {
  const SpcaProblem p{8, 0.0, 0.2};
  int close = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const SpcaModel m = SpcaModel::make(8, 8, seed, 10.0);
    CovarianceStream s(m, 10, 400);
    Rng rng(seed + 100);
    const RunResult r = run(s, random_unit_vector(8, rng), spca_oracle(p), Schedule{});
    if (spca_recovery_error(r.x.col(0), m.v1()) < 0.05) ++close;
  }
  CHECK(close >= 18);
}
