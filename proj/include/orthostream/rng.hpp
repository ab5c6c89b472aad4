#ifndef ORTHOSTREAM_RNG_HPP
#define ORTHOSTREAM_RNG_HPP

#include <cstdint>
#include <random>

#include "orthostream/matops.hpp"

namespace ortho {

using Rng = std::mt19937_64;

/// Derives an independent stream seed from a base seed and a stream id
/// (splitmix64 finalizer over both words).
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream);

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

Mat gaussian_matrix(Index rows, Index cols, Rng& rng);
Vec gaussian_vector(Index n, Rng& rng);

/// Uniform on the unit sphere S^{n-1}.
Vec random_unit_vector(Index n, Rng& rng);

Mat random_orthogonal(Index n, Rng& rng);

}  // namespace ortho

#endif  // ORTHOSTREAM_RNG_HPP
