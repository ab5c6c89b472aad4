#include <doctest.h>

#include <cmath>

#include "orthostream/montecarlo.hpp"
#include "orthostream/rng.hpp"

using namespace ortho;

TEST_CASE("plan chunking") {
  mc::Plan p{2500, 1, 1024};
  CHECK(p.chunk_count() == 3);
  CHECK(p.chunk_size(0) == 1024);
  CHECK(p.chunk_size(2) == 452);
  CHECK(p.chunk_size(3) == 0);
}

TEST_CASE("Chan merge equals one-pass moments") {
  Rng rng(1);
  std::normal_distribution<double> nd(2.0, 3.0);
  std::vector<double> v(1000);
  for (auto& x : v) x = nd(rng);
  auto moments = [&](std::size_t lo, std::size_t hi) {
    mc::ScalarMoments m;
    m.count = hi - lo;
    for (std::size_t i = lo; i < hi; ++i) m.mean += v[i];
    m.mean /= static_cast<double>(m.count);
    for (std::size_t i = lo; i < hi; ++i) m.m2 += (v[i] - m.mean) * (v[i] - m.mean);
    return m;
  };
  const auto all = moments(0, 1000);
  const auto merged = mc::merge(mc::merge(moments(0, 137), moments(137, 600)), moments(600, 1000));
  CHECK(merged.count == 1000);
  CHECK(merged.mean == doctest::Approx(all.mean).epsilon(1e-13));
  CHECK(merged.m2 == doctest::Approx(all.m2).epsilon(1e-12));
  CHECK(mc::merge(mc::ScalarMoments{}, all).mean == all.mean);
}

TEST_CASE("parallel kernels agree with the serial reference") {
  OdlProblem p{7};
  const mc::BgSampler sampler{random_orthogonal(7, std::uint64_t{3}), 0.4};
  const mc::Plan plan{5000, 11, 700};
  const Mat d = random_orthogonal(7, std::uint64_t{4});
  const Mat e = random_orthogonal(7, std::uint64_t{5});
  for (Objective obj : {Objective::L3, Objective::L4}) {
    p.objective = obj;
    const auto a = mc::parallel::objective(d, obj, sampler, plan);
    const auto b = mc::serial::objective(d, obj, sampler, plan);
    CHECK(a.count == 5000);
    CHECK(a.mean == doctest::Approx(b.mean).epsilon(1e-10));
    CHECK(a.m2 == doctest::Approx(b.m2).epsilon(1e-9));
    const auto da = mc::parallel::objective_difference(d, e, obj, sampler, plan);
    const auto db = mc::serial::objective_difference(d, e, obj, sampler, plan);
    CHECK(da.mean == doctest::Approx(db.mean).epsilon(1e-9));
    const auto ga = mc::parallel::gradient(d, p, sampler, plan);
    const auto gb = mc::serial::gradient(d, p, sampler, plan);
    CHECK((ga.mean - gb.mean).norm() <= 1e-10 * gb.mean.norm());
    CHECK((ga.m2 - gb.m2).norm() <= 1e-8 * gb.m2.norm());
  }
}

TEST_CASE("parallel kernels are reproducible and depend only on the plan") {
  const mc::BgSampler sampler{random_orthogonal(5, std::uint64_t{8}), 0.3};
  const Mat d = random_orthogonal(5, std::uint64_t{9});
  const mc::Plan plan{3000, 2, 512};
  const auto a = mc::parallel::objective(d, Objective::L3, sampler, plan);
  const auto b = mc::parallel::objective(d, Objective::L3, sampler, plan);
  CHECK(a.mean == b.mean);
  CHECK(a.m2 == b.m2);
  const auto c = mc::parallel::objective(d, Objective::L3, sampler, mc::Plan{3000, 3, 512});
  CHECK(a.mean != c.mean);
}

TEST_CASE("objective at the truth is near the closed-form optimum") {
  const double theta = 0.3;
  const mc::BgSampler sampler{random_orthogonal(5, std::uint64_t{12}), theta};
  const auto m = mc::parallel::objective(sampler.d_true, Objective::L3, sampler, mc::Plan{100000, 4});
  const double opt = theory_bounds(5, theta).optimum_value;
  CHECK(std::abs(m.mean - opt) <= 3.0 * m.stderr_of_mean());
}

TEST_CASE("kernels reject mismatched shapes and empty plans") {
  const mc::BgSampler sampler{Mat::Identity(3, 3), 0.3};
  CHECK_THROWS(mc::parallel::objective(Mat::Identity(4, 4), Objective::L3, sampler, mc::Plan{10, 1}));
  CHECK_THROWS(mc::serial::objective(Mat::Identity(3, 3), Objective::L3, sampler, mc::Plan{0, 1}));
}
