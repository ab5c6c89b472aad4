#ifndef ORTHOSTREAM_MATOPS_HPP
#define ORTHOSTREAM_MATOPS_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace ortho {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using Index = Eigen::Index;

// Numerical tolerances for double precision at n <= 128.
namespace tol {
inline constexpr double orthogonality = 1e-10;
inline constexpr double reconstruction = 1e-8;
inline constexpr double singular_floor = 1e-12;
inline constexpr double membership = 1e-8;
}  // namespace tol

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown by polar() when the input has a singular value at or below
/// tol::singular_floor. Carries the offending value.
class SingularMatrixError : public NumericError {
 public:
  SingularMatrixError(const std::string& what, double smallest)
      : NumericError(what), smallest_singular_value(smallest) {}
  double smallest_singular_value;
};

/// Thin SVD, a = u * diag(sigma) * vt, sigma nonincreasing.
struct SvdFactors {
  Mat u;
  Vec sigma;
  Mat vt;

  Mat reconstruct() const { return u * sigma.asDiagonal() * vt; }
};

bool all_finite(const Mat& a);
void require_finite(const Mat& a, std::string_view what);

SvdFactors svd(const Mat& a);

/// Orthogonal polar factor U * V^T. Requires a square, full-rank input.
Mat polar(const Mat& a);

/// Haar-distributed orthogonal matrix from the QR factorization of a
/// standard Gaussian matrix, with the sign of diag(R) folded into Q.
Mat random_orthogonal(Index n, std::uint64_t seed);

struct Norms {
  double spectral = 0.0;
  double nuclear = 0.0;
  double frobenius = 0.0;
};

Norms norms(const Mat& a);
double spectral_norm(const Mat& a);
double nuclear_norm(const Mat& a);

/// (sum |a_ij|^p)^(1/p); p >= 1.
double entrywise_norm(const Mat& a, double p);

/// sum |a_ij|^p, e.g. the fourth-power sum used by the recovery metric.
double entrywise_power_sum(const Mat& a, double p);

/// Frobenius inner product <a, b> = tr(a^T b).
double inner(const Mat& a, const Mat& b);

/// max |(q^T q - I)_ij|.
double orthogonality_defect(const Mat& q);
bool is_orthogonal(const Mat& q, double tolerance = tol::orthogonality);

}  // namespace ortho

#endif  // ORTHOSTREAM_MATOPS_HPP
