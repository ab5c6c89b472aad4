#include "orthostream/selfcheck.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <sstream>

#include "orthostream/eval.hpp"
#include "orthostream/montecarlo.hpp"
#include "orthostream/odl.hpp"
#include "orthostream/rng.hpp"
#include "orthostream/spca.hpp"
#include "orthostream/stream.hpp"

namespace ortho {

namespace {

struct Recorder {
  std::vector<CheckResult>& out;

  void operator()(const std::string& name, const std::function<std::string()>& body) {
    CheckResult r{name, false, ""};
    try {
      r.detail = body();
      r.passed = r.detail.empty();
      if (r.passed) r.detail = "ok";
    } catch (const std::exception& e) {
      r.detail = std::string("exception: ") + e.what();
    }
    out.push_back(std::move(r));
  }
};

std::string worst(const char* what, double value, double limit) {
  if (value <= limit) return "";
  std::ostringstream s;
  s << what << " = " << value << " exceeds " << limit;
  return s.str();
}

Mat sign_permutation(Index n, Rng& rng) {
  std::vector<Index> perm(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  Mat xi = Mat::Zero(n, n);
  std::bernoulli_distribution coin(0.5);
  for (Index i = 0; i < n; ++i) xi(i, perm[static_cast<std::size_t>(i)]) = coin(rng) ? 1.0 : -1.0;
  return xi;
}

}  // namespace

std::vector<CheckResult> run_self_checks(std::uint64_t seed) {
  std::vector<CheckResult> results;
  Recorder check{results};
  Rng rng(mix_seed(seed, 0xc4ec));

  check("svd reconstructs and polar is orthogonal", [&] {
    double rec = 0.0, orth = 0.0;
    for (int i = 0; i < 20; ++i) {
      const Mat a = gaussian_matrix(6, 6, rng);
      rec = std::max(rec, (svd(a).reconstruct() - a).norm() / a.norm());
      orth = std::max(orth, orthogonality_defect(polar(a)));
    }
    auto msg = worst("relative reconstruction error", rec, tol::reconstruction);
    return msg.empty() ? worst("orthogonality defect", orth, tol::orthogonality) : msg;
  });

  check("spectral-ball LMO attains minus the nuclear norm", [&] {
    double dev = 0.0;
    for (int i = 0; i < 20; ++i) {
      const Mat g = gaussian_matrix(5, 5, rng);
      const LmoResult r = spectral_ball_lmo(g);
      dev = std::max(dev, std::abs(inner(g, r.s) + nuclear_norm(g)));
      for (int k = 0; k < 50; ++k)
        if (inner(g, random_orthogonal(5, rng)) < r.min_value - 1e-9) return std::string("probe beat the LMO");
    }
    return worst("|<G,S> + ||G||_*|", dev, 1e-9);
  });

  check("recovery error is zero on the sign-permutation class", [&] {
    double e = 0.0;
    for (int i = 0; i < 10; ++i) {
      const Mat d = random_orthogonal(8, rng);
      e = std::max(e, recovery_error(d * sign_permutation(8, rng).transpose(), d));
    }
    return worst("recovery error", e, 1e-12);
  });

  check("hard threshold keeps the largest entries and is idempotent", [&] {
    Vec a(3);
    a << 3, -5, 1;
    Vec want(3);
    want << 0, -5, 0;
    if (hard_threshold(a, 1) != want) return std::string("(3,-5,1), eta=1 gave the wrong vector");
    const Vec b = gaussian_vector(56, rng);
    const Vec t = hard_threshold(b, 8);
    if (hard_threshold(t, 8) != t) return std::string("not idempotent");
    return std::string();
  });

  check("hlndm is antisymmetric and flags identical series", [&] {
    std::vector<double> x(50), y(50);
    std::uniform_real_distribution<double> u(0.01, 0.1);
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = u(rng);
      y[i] = u(rng);
    }
    const auto ab = hlndm(x, y, 4), ba = hlndm(y, x, 4);
    if (ab.statistic != -ba.statistic) return std::string("swapping the series did not negate the statistic");
    const auto same = hlndm(x, x, 4);
    if (!same.degenerate || same.statistic != 0.0) return std::string("identical series not degenerate");
    return std::string();
  });

  check("l3 and l4 gradients match central differences", [&] {
    double rel = 0.0;
    for (Objective obj : {Objective::L3, Objective::L4}) {
      OdlProblem p;
      p.n = 4;
      p.objective = obj;
      p.gradient_scale = GradientScale::CalculusExact;
      const Mat d = gaussian_matrix(4, 4, rng);
      const Mat y = gaussian_matrix(4, 3, rng);
      const Mat g = sample_gradient(p, d, y);
      const double h = 1e-6;
      Mat fd(4, 4);
      for (Index i = 0; i < 4; ++i)
        for (Index j = 0; j < 4; ++j) {
          Mat dp = d, dm = d;
          dp(i, j) += h;
          dm(i, j) -= h;
          fd(i, j) = (sample_objective(obj, dp, y) - sample_objective(obj, dm, y)) / (2 * h);
        }
      rel = std::max(rel, (fd - g).norm() / g.norm());
    }
    return worst("relative finite-difference error", rel, 1e-5);
  });

  check("huber is continuous at the kink", [&] {
    Vec z(1);
    z << 0.2;
    const double below = huber(z, 0.2);
    z << 0.2 + 1e-12;
    return worst("jump", std::abs(huber(z, 0.2) - below), 1e-10);
  });

  check("parallel and serial Monte-Carlo kernels agree", [&] {
    OdlProblem p;
    p.n = 6;
    const mc::BgSampler sampler{random_orthogonal(6, rng), 0.3};
    const mc::Plan plan{3000, seed, 256};
    const Mat d = random_orthogonal(6, rng);
    const auto a = mc::parallel::objective(d, Objective::L3, sampler, plan);
    const auto b = mc::serial::objective(d, Objective::L3, sampler, plan);
    const auto ga = mc::parallel::gradient(d, p, sampler, plan);
    const auto gb = mc::serial::gradient(d, p, sampler, plan);
    auto msg = worst("objective mismatch", std::abs(a.mean - b.mean) / std::abs(b.mean), 1e-10);
    return msg.empty() ? worst("gradient mismatch", (ga.mean - gb.mean).norm() / gb.mean.norm(), 1e-10) : msg;
  });

  check("proposed iterates stay orthogonal", [&] {
    const SyntheticModel model = SyntheticModel::make(5, 0.3, seed);
    SyntheticStream stream(model, 5, 50);
    OdlProblem p;
    p.n = 5;
    const ProblemOracle oracle = odl_oracle(p);
    double worst_defect = 0.0;
    RunOptions opts;
    opts.probes.push_back([&](std::size_t, const SfwState& s, std::map<std::string, double>&) {
      worst_defect = std::max(worst_defect, orthogonality_defect(s.x));
    });
    run(stream, random_orthogonal(5, seed), oracle, p.schedule(), opts);
    return worst("orthogonality defect", worst_defect, tol::orthogonality);
  });

  check("spca iterates stay in the unit ball", [&] {
    const SpcaModel model = SpcaModel::make(10, 3, seed);
    if (orthogonality_defect(model.v) > tol::orthogonality) return std::string("model V not orthogonal");
    CovarianceStream stream(model, 5, 50);
    const ProblemOracle oracle = spca_oracle({10, 1.0, 0.2});
    double max_norm = 0.0;
    RunOptions opts;
    opts.probes.push_back([&](std::size_t, const SfwState& s, std::map<std::string, double>&) {
      max_norm = std::max(max_norm, s.x.norm());
    });
    run(stream, random_unit_vector(10, rng), oracle, Schedule{}, opts);
    return worst("iterate norm", max_norm, 1.0 + tol::membership);
  });

  return results;
}

}  // namespace ortho
