#include "orthostream/rng.hpp"

#include <stdexcept>

namespace ortho {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream) {
  return splitmix64(splitmix64(base) ^ (stream * 0xd1b54a32d192ed03ULL + 0x2545f4914f6cdd1dULL));
}

Mat gaussian_matrix(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Mat g(rows, cols);
  // column-major fill order is part of the determinism contract
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) g(i, j) = normal(rng);
  return g;
}

Vec gaussian_vector(Index n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vec g(n);
  for (Index i = 0; i < n; ++i) g(i) = normal(rng);
  return g;
}

Vec random_unit_vector(Index n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("random_unit_vector: n must be >= 1");
  for (;;) {
    Vec g = gaussian_vector(n, rng);
    const double len = g.norm();
    if (len > 1e-300) return g / len;
  }
}

Mat random_orthogonal(Index n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("random_orthogonal: n must be >= 1");
  const Mat g = gaussian_matrix(n, n, rng);
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ() * Mat::Identity(n, n);
  const Mat& r = qr.matrixQR();
  for (Index j = 0; j < n; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

Mat random_orthogonal(Index n, std::uint64_t seed) {
  Rng rng(seed);
  return random_orthogonal(n, rng);
}

}  // namespace ortho
