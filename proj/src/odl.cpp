#include "orthostream/odl.hpp"

#include <cmath>
#include <iostream>
#include <numbers>
#include <sstream>

namespace ortho {

std::string to_string(Objective o) { return o == Objective::L3 ? "l3" : "l4"; }
std::string to_string(UpdateRule u) { return u == UpdateRule::Polar ? "polar" : "plain"; }
std::string to_string(GradientScale s) {
  return s == GradientScale::PaperFormula ? "paper_formula" : "calculus_exact";
}

void OdlProblem::validate() const {
  if (n < 2) throw std::invalid_argument("OdlProblem: n must be >= 2");
}

Schedule OdlProblem::schedule() const {
  Schedule s;
  s.clamp_rho = clamp_rho;
  return s;
}

nlohmann::json OdlProblem::to_json() const {
  return {{"n", n},
          {"objective", to_string(objective)},
          {"update", to_string(update)},
          {"gradient_scale", to_string(gradient_scale)},
          {"clamp_rho", clamp_rho}};
}

OdlProblem OdlProblem::from_json(const nlohmann::json& j) {
  OdlProblem p;
  p.n = j.at("n").get<Index>();
  const auto obj = j.value("objective", std::string("l3"));
  if (obj == "l3") p.objective = Objective::L3;
  else if (obj == "l4") p.objective = Objective::L4;
  else throw std::invalid_argument("OdlProblem: objective must be \"l3\" or \"l4\"");
  const auto upd = j.value("update", std::string("polar"));
  if (upd == "polar") p.update = UpdateRule::Polar;
  else if (upd == "plain") p.update = UpdateRule::PlainCombination;
  else throw std::invalid_argument("OdlProblem: update must be \"polar\" or \"plain\"");
  const auto sc = j.value("gradient_scale", std::string("paper_formula"));
  if (sc == "paper_formula" || sc == "paper") p.gradient_scale = GradientScale::PaperFormula;
  else if (sc == "calculus_exact" || sc == "exact") p.gradient_scale = GradientScale::CalculusExact;
  else throw std::invalid_argument("OdlProblem: gradient_scale must be \"paper_formula\" or \"calculus_exact\"");
  p.clamp_rho = j.value("clamp_rho", true);
  p.validate();
  return p;
}

double gaussian_third_abs_moment() { return std::pow(2.0, 1.5) / std::sqrt(std::numbers::pi); }

double TheoryBounds::variance_bound(Index batch_size) const {
  if (batch_size < 1) throw std::invalid_argument("variance_bound: batch size must be >= 1");
  const auto nn = static_cast<double>(n);
  return 3.0 * theta * nn * nn / static_cast<double>(batch_size);
}

TheoryBounds theory_bounds(Index n, double theta) {
  if (n < 1) throw std::invalid_argument("theory_bounds: n must be >= 1");
  if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("theory_bounds: theta must lie in (0, 1)");
  const auto nn = static_cast<double>(n);
  TheoryBounds b;
  b.n = n;
  b.theta = theta;
  b.diam = std::sqrt(2.0 * nn);
  b.lipschitz = std::sqrt(2.0 / std::numbers::pi) * std::pow(nn, 1.5) * (nn + 1.0) * theta;
  b.optimum_value = -nn * gaussian_third_abs_moment() * theta;
  return b;
}

namespace {

void check_dims(const Mat& d, const Mat& samples, const char* who) {
  if (d.rows() != d.cols() || d.rows() != samples.rows()) {
    std::ostringstream msg;
    msg << who << ": dimension mismatch (d is " << d.rows() << "x" << d.cols() << ", samples are "
        << samples.rows() << "-dimensional)";
    throw std::invalid_argument(msg.str());
  }
  if (samples.cols() < 1) throw std::invalid_argument(std::string(who) + ": empty batch");
}

}  // namespace

Mat l3_sample_gradient(const Mat& d, const Mat& samples, GradientScale scale) {
  check_dims(d, samples, "l3_sample_gradient");
  const Mat z = d.transpose() * samples;
  const Mat w = (z.array().abs() * z.array()).matrix();
  const double factor = (scale == GradientScale::CalculusExact ? 3.0 : 1.0) / static_cast<double>(samples.cols());
  return -factor * (samples * w.transpose());
}

Mat l4_sample_gradient(const Mat& d, const Mat& samples, GradientScale scale) {
  check_dims(d, samples, "l4_sample_gradient");
  const Mat z = d.transpose() * samples;
  const Mat w = z.array().cube().matrix();
  const double factor = (scale == GradientScale::CalculusExact ? 4.0 : 1.0) / static_cast<double>(samples.cols());
  return -factor * (samples * w.transpose());
}

double l3_sample_objective(const Mat& d, const Mat& samples) {
  check_dims(d, samples, "l3_sample_objective");
  const Mat z = d.transpose() * samples;
  return -z.array().abs().cube().sum() / static_cast<double>(samples.cols());
}

double l4_sample_objective(const Mat& d, const Mat& samples) {
  check_dims(d, samples, "l4_sample_objective");
  const Mat z = d.transpose() * samples;
  return -z.array().square().square().sum() / static_cast<double>(samples.cols());
}

Mat sample_gradient(const OdlProblem& p, const Mat& d, const Mat& samples) {
  return p.objective == Objective::L3 ? l3_sample_gradient(d, samples, p.gradient_scale)
                                      : l4_sample_gradient(d, samples, p.gradient_scale);
}

double sample_objective(Objective o, const Mat& d, const Mat& samples) {
  return o == Objective::L3 ? l3_sample_objective(d, samples) : l4_sample_objective(d, samples);
}

LmoResult spectral_ball_lmo(const Mat& g) {
  if (g.rows() != g.cols()) throw std::invalid_argument("spectral_ball_lmo: g must be square");
  require_finite(g, "spectral_ball_lmo");
  if (g.isZero(0.0)) return {Mat::Identity(g.rows(), g.cols()), 0.0};
  const SvdFactors f = svd(-g);
  return {f.u * f.vt, -f.sigma.sum()};
}

bool in_spectral_ball(const Mat& x, double tolerance) {
  if (!x.allFinite() || x.rows() != x.cols()) return false;
  return spectral_norm(x) <= 1.0 + tolerance;
}

Mat polar_update(const Mat& a, PolarUpdateLog& log) {
  try {
    return polar(a);
  } catch (const SingularMatrixError& e) {
    ++log.rank_deficient_events;
    double scale = 1e-12;
    for (int attempt = 0; attempt < 8; ++attempt, scale *= 10.0) {
      std::cerr << "polar_update: " << e.what() << "; perturbing by " << scale << " * Q\n";
      try {
        return polar(a + scale * random_orthogonal(a.rows(), log.rng));
      } catch (const SingularMatrixError&) {
      }
    }
    throw;
  }
}

ProblemOracle odl_oracle(const OdlProblem& problem, std::shared_ptr<PolarUpdateLog> log) {
  problem.validate();
  if (!log) log = std::make_shared<PolarUpdateLog>(0x0d1c0ffeeULL);

  ProblemOracle o;
  o.sample_gradient = [problem](const Mat& d, const MiniBatch& b) {
    return sample_gradient(problem, d, b.samples);
  };
  o.sample_objective = [obj = problem.objective](const Mat& d, const MiniBatch& b) {
    return sample_objective(obj, d, b.samples);
  };
  o.lmo = [](const Mat& g) { return spectral_ball_lmo(g).s; };
  if (problem.update == UpdateRule::Polar)
    o.update_map = [log](const Mat& a) { return polar_update(a, *log); };
  o.contains = [](const Mat& x, double tolerance) { return in_spectral_ball(x, tolerance); };
  return o;
}

Mat batch_initialize_from(const Mat& init_block, const OdlProblem& problem, std::size_t iterations,
                          Mat d0) {
  problem.validate();
  if (init_block.cols() < 1) throw std::invalid_argument("batch_initialize: empty init block");
  if (init_block.rows() != problem.n) throw std::invalid_argument("batch_initialize: dimension mismatch");
  const ProblemOracle oracle = odl_oracle(problem);
  const Schedule sched = problem.schedule();
  SfwState state = SfwState::start(std::move(d0));
  const MiniBatch whole{1, init_block};
  for (std::size_t i = 0; i < iterations; ++i) sfw_step(state, whole, oracle, sched);
  return state.x;
}

Mat batch_initialize(const Mat& init_block, const OdlProblem& problem, std::size_t iterations,
                     std::uint64_t seed) {
  return batch_initialize_from(init_block, problem, iterations, random_orthogonal(problem.n, seed));
}

}  // namespace ortho
