#include <doctest.h>

#include <cmath>

#include "orthostream/matops.hpp"
#include "orthostream/rng.hpp"

using namespace ortho;

namespace {

// Newton iteration X <- (X + X^{-T}) / 2 converges to the orthogonal polar
// factor; independent of the SVD path.
Mat newton_polar(Mat x) {
  for (int i = 0; i < 100; ++i) {
    const Mat next = 0.5 * (x + x.inverse().transpose());
    if ((next - x).norm() < 1e-15) return next;
    x = next;
  }
  return x;
}

}  // namespace

TEST_CASE("svd of identity and diagonal matrices") {
  const SvdFactors id = svd(Mat::Identity(3, 3));
  CHECK((id.sigma - Vec::Ones(3)).norm() < 1e-15);

  Mat d = Mat::Zero(3, 3);
  d.diagonal() << 3, 2, 1;
  const SvdFactors f = svd(d);
  CHECK(f.sigma(0) == doctest::Approx(3));
  CHECK(f.sigma(1) == doctest::Approx(2));
  CHECK(f.sigma(2) == doctest::Approx(1));
  // u and vt are I up to a common column sign
  CHECK((f.u.cwiseAbs() - Mat::Identity(3, 3)).norm() < 1e-14);
  CHECK((f.u * f.vt - Mat::Identity(3, 3)).norm() < 1e-14);
}

TEST_CASE("svd reconstructs random inputs with orthonormal factors") {
  Rng rng(11);
  for (int i = 0; i < 20; ++i) {
    const Mat a = gaussian_matrix(5, 5, rng);
    const SvdFactors f = svd(a);
    CHECK((f.reconstruct() - a).norm() / a.norm() < tol::reconstruction);
    CHECK(orthogonality_defect(f.u) < tol::orthogonality);
    CHECK(orthogonality_defect(f.vt.transpose()) < tol::orthogonality);
    for (Index k = 1; k < f.sigma.size(); ++k) CHECK(f.sigma(k) <= f.sigma(k - 1));
  }
}

TEST_CASE("svd handles rectangular input and rejects empty or non-finite input") {
  Rng rng(3);
  const Mat a = gaussian_matrix(4, 2, rng);
  const SvdFactors f = svd(a);
  CHECK(f.u.rows() == 4);
  CHECK(f.u.cols() == 2);
  CHECK((f.reconstruct() - a).norm() < 1e-12);
  CHECK_THROWS(svd(Mat(0, 0)));
  Mat bad = Mat::Identity(2, 2);
  bad(0, 1) = std::nan("");
  CHECK_THROWS_AS(svd(bad), NumericError);
}

TEST_CASE("polar of orthogonal and scaled identity") {
  const Mat q = random_orthogonal(6, std::uint64_t{5});
  CHECK((polar(q) - q).norm() < 1e-12);
  CHECK((polar(0.5 * Mat::Identity(4, 4)) - Mat::Identity(4, 4)).norm() < 1e-14);
}

TEST_CASE("polar matches the Newton iteration oracle and is idempotent") {
  Rng rng(17);
  for (int i = 0; i < 20; ++i) {
    const Mat a = gaussian_matrix(4, 4, rng);
    const Mat p = polar(a);
    CHECK((p - newton_polar(a)).norm() < 1e-10);
    CHECK(orthogonality_defect(p) < tol::orthogonality);
    CHECK((polar(p) - p).norm() < 1e-10);
    // nearest orthogonal matrix: no random orthogonal probe is closer
    for (int k = 0; k < 50; ++k) CHECK((a - p).norm() <= (a - random_orthogonal(4, rng)).norm() + 1e-12);
  }
}

TEST_CASE("polar rejects singular and non-square input") {
  Mat s = Mat::Identity(3, 3);
  s(2, 2) = 0.0;
  CHECK_THROWS_AS(polar(s), SingularMatrixError);
  try {
    polar(s);
  } catch (const SingularMatrixError& e) {
    CHECK(e.smallest_singular_value <= tol::singular_floor);
  }
  CHECK_THROWS(polar(Mat::Ones(2, 3)));
}

TEST_CASE("random_orthogonal") {
  const Mat one = random_orthogonal(1, std::uint64_t{9});
  CHECK(std::abs(one(0, 0)) == doctest::Approx(1.0));
  const Mat q = random_orthogonal(10, std::uint64_t{1});
  CHECK(orthogonality_defect(q) < tol::orthogonality);
  CHECK(is_orthogonal(q));
  CHECK((q - random_orthogonal(10, std::uint64_t{1})).norm() == 0.0);
  CHECK((q - random_orthogonal(10, std::uint64_t{2})).norm() > 1e-6);
}

TEST_CASE("random_orthogonal is Haar: mean trace is near zero") {
  // For Haar Q, E[tr Q] = 0 and Var[tr Q] = 1.
  double sum = 0.0;
  const int m = 4000;
  Rng rng(23);
  for (int i = 0; i < m; ++i) sum += random_orthogonal(5, rng).trace();
  CHECK(std::abs(sum / m) < 4.0 / std::sqrt(static_cast<double>(m)));
}

TEST_CASE("norms on simple matrices") {
  const Norms id = norms(Mat::Identity(4, 4));
  CHECK(id.spectral == doctest::Approx(1));
  CHECK(id.nuclear == doctest::Approx(4));
  CHECK(id.frobenius == doctest::Approx(2));
  CHECK(entrywise_power_sum(Mat::Identity(4, 4), 4) == doctest::Approx(4));
  Mat d = Mat::Zero(3, 3);
  d.diagonal() << 3, -2, 1;
  CHECK(nuclear_norm(d) == doctest::Approx(6));
  CHECK(spectral_norm(d) == doctest::Approx(3));
  CHECK(entrywise_norm(d, 1) == doctest::Approx(6));
  CHECK_THROWS(entrywise_norm(d, 0.5));
}

TEST_CASE("norm relations on random matrices") {
  Rng rng(29);
  for (int i = 0; i < 50; ++i) {
    const Mat a = gaussian_matrix(4, 4, rng);
    const Norms n = norms(a);
    // direct oracle from the singular values
    Eigen::JacobiSVD<Mat> js(a);
    CHECK(n.nuclear == doctest::Approx(js.singularValues().sum()).epsilon(1e-12));
    CHECK(n.frobenius == doctest::Approx(std::sqrt((a.array() * a.array()).sum())).epsilon(1e-12));
    CHECK(n.nuclear >= n.spectral);
    CHECK(n.frobenius * n.frobenius <= n.nuclear * n.spectral + 1e-9);
    double direct = 0.0;
    for (Index r = 0; r < 4; ++r)
      for (Index c = 0; c < 4; ++c) direct += std::pow(std::abs(a(r, c)), 3);
    CHECK(entrywise_power_sum(a, 3) == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("inner product is the trace form") {
  Rng rng(31);
  const Mat a = gaussian_matrix(3, 4, rng), b = gaussian_matrix(3, 4, rng);
  CHECK(inner(a, b) == doctest::Approx((a.transpose() * b).trace()).epsilon(1e-13));
  CHECK_THROWS(inner(a, Mat::Zero(4, 3)));
}
