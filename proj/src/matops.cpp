#include "orthostream/matops.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace ortho {

bool all_finite(const Mat& a) { return a.allFinite(); }

void require_finite(const Mat& a, std::string_view what) {
  if (a.allFinite()) return;
  for (Index j = 0; j < a.cols(); ++j) {
    for (Index i = 0; i < a.rows(); ++i) {
      if (!std::isfinite(a(i, j))) {
        std::ostringstream msg;
        msg << what << ": non-finite entry " << a(i, j) << " at (" << i << ", " << j << ")";
        throw NumericError(msg.str());
      }
    }
  }
}

SvdFactors svd(const Mat& a) {
  require_finite(a, "svd");
  if (a.size() == 0) throw std::invalid_argument("svd: empty matrix");
  Eigen::JacobiSVD<Mat> jacobi(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return SvdFactors{jacobi.matrixU(), jacobi.singularValues(), jacobi.matrixV().transpose()};
}

Mat polar(const Mat& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("polar: matrix must be square");
  const SvdFactors f = svd(a);
  const double smallest = f.sigma(f.sigma.size() - 1);
  if (!(smallest > tol::singular_floor)) {
    std::ostringstream msg;
    msg << "polar: rank-deficient input (smallest singular value " << smallest << ")";
    throw SingularMatrixError(msg.str(), smallest);
  }
  return f.u * f.vt;
}

Norms norms(const Mat& a) {
  const SvdFactors f = svd(a);
  return Norms{f.sigma(0), f.sigma.sum(), a.norm()};
}

double spectral_norm(const Mat& a) { return svd(a).sigma(0); }

double nuclear_norm(const Mat& a) { return svd(a).sigma.sum(); }

double entrywise_power_sum(const Mat& a, double p) {
  if (p < 1.0) throw std::invalid_argument("entrywise norm requires p >= 1");
  require_finite(a, "entrywise_power_sum");
  if (p == 4.0) return a.array().square().square().sum();
  return a.array().abs().pow(p).sum();
}

double entrywise_norm(const Mat& a, double p) {
  return std::pow(entrywise_power_sum(a, p), 1.0 / p);
}

double inner(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("inner: shape mismatch");
  return (a.array() * b.array()).sum();
}

double orthogonality_defect(const Mat& q) {
  if (q.rows() != q.cols()) return std::numeric_limits<double>::infinity();
  return (q.transpose() * q - Mat::Identity(q.rows(), q.cols())).cwiseAbs().maxCoeff();
}

bool is_orthogonal(const Mat& q, double tolerance) {
  return q.allFinite() && orthogonality_defect(q) <= tolerance;
}

}  // namespace ortho
