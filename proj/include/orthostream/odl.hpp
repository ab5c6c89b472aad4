#ifndef ORTHOSTREAM_ODL_HPP
#define ORTHOSTREAM_ODL_HPP

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>

#include <json.hpp>

#include "orthostream/fw_core.hpp"
#include "orthostream/matops.hpp"
#include "orthostream/rng.hpp"

namespace ortho {

enum class Objective { L3, L4 };
enum class UpdateRule { Polar, PlainCombination };

/// PaperFormula drops the constant factor of the calculus derivative
/// (3 for the cubic objective, 4 for the quartic one). The LMO direction is
/// scale invariant, so the choice only changes gradient and gap magnitudes.
enum class GradientScale { PaperFormula, CalculusExact };

std::string to_string(Objective o);
std::string to_string(UpdateRule u);
std::string to_string(GradientScale s);

/// Online orthogonal dictionary learning over the unit spectral ball:
/// minimize E[-||D^T y||_3^3] (or -||D^T y||_4^4).
struct OdlProblem {
  Index n = 0;
  Objective objective = Objective::L3;
  UpdateRule update = UpdateRule::Polar;
  GradientScale gradient_scale = GradientScale::PaperFormula;
  bool clamp_rho = true;

  void validate() const;
  Schedule schedule() const;
  nlohmann::json to_json() const;
  static OdlProblem from_json(const nlohmann::json& j);
};

/// Closed-form constants of the convergence analysis under the
/// Bernoulli-Gaussian model.
struct TheoryBounds {
  double diam = 0.0;           // sqrt(2N)
  double lipschitz = 0.0;      // sqrt(2/pi) N^{3/2} (N+1) theta
  double optimum_value = 0.0;  // -N gamma1 theta, gamma1 = 2^{3/2}/sqrt(pi)
  double theta = 0.0;
  Index n = 0;

  double variance_bound(Index batch_size) const;  // 3 theta N^2 / m
};

TheoryBounds theory_bounds(Index n, double theta);

/// Third absolute moment of a standard Gaussian, 2^{3/2}/sqrt(pi).
double gaussian_third_abs_moment();

/// Batch mean of -y (|z| .* z)^T with z = d^T y; times 3 under CalculusExact.
Mat l3_sample_gradient(const Mat& d, const Mat& samples, GradientScale scale);
/// Batch mean of -y (z .^ 3)^T; times 4 under CalculusExact.
Mat l4_sample_gradient(const Mat& d, const Mat& samples, GradientScale scale);

/// Batch means of -||d^T y||_3^3 and -||d^T y||_4^4.
double l3_sample_objective(const Mat& d, const Mat& samples);
double l4_sample_objective(const Mat& d, const Mat& samples);

Mat sample_gradient(const OdlProblem& p, const Mat& d, const Mat& samples);
double sample_objective(Objective o, const Mat& d, const Mat& samples);

struct LmoResult {
  Mat s;                  // U V^T with U S V^T = svd(-g)
  double min_value = 0.0; // <g, s> = -||g||_*
};

/// argmin of <g, s> over the unit spectral ball. A zero g returns the identity.
LmoResult spectral_ball_lmo(const Mat& g);

bool in_spectral_ball(const Mat& x, double tolerance = tol::membership);

/// Bookkeeping for the polar update. A singular combination is perturbed by
/// a small random orthogonal matrix before retrying; each singular input is
/// counted once.
struct PolarUpdateLog {
  explicit PolarUpdateLog(std::uint64_t seed) : rng(seed) {}
  Rng rng;
  std::size_t rank_deficient_events = 0;
};

/// Polar(a), perturbing a by scale * Q (Q random orthogonal, scale starting
/// at 1e-12 and growing tenfold) while a stays singular.
Mat polar_update(const Mat& a, PolarUpdateLog& log);

/// Wires gradient, objective, LMO, update map and membership for the problem.
/// The log, when given, receives rank-deficiency events of the polar update.
ProblemOracle odl_oracle(const OdlProblem& problem, std::shared_ptr<PolarUpdateLog> log = nullptr);

/// `iterations` NoncvxSFW steps from random_orthogonal(n, seed), each using
/// the whole init block as the mini-batch.
Mat batch_initialize(const Mat& init_block, const OdlProblem& problem, std::size_t iterations,
                     std::uint64_t seed);

/// Same, from a caller-supplied start.
Mat batch_initialize_from(const Mat& init_block, const OdlProblem& problem, std::size_t iterations,
                          Mat d0);

}  // namespace ortho

#endif  // ORTHOSTREAM_ODL_HPP
