#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

#include "orthostream/rng.hpp"
#include "orthostream/stream.hpp"

using namespace ortho;

namespace {

// |observed - expected| within k binomial/CLT standard errors.
bool within_sigma(double observed, double expected, double sd, std::size_t n, double k = 3.0) {
  return std::abs(observed - expected) <= k * sd / std::sqrt(static_cast<double>(n));
}

}  // namespace

TEST_CASE("Bernoulli-Gaussian moments") {
  const double theta = 0.3;
  const Index count = 100000;
  const Mat x = sample_bernoulli_gaussian(1, theta, count, std::uint64_t{42});
  double zeros = 0, m2 = 0, m3 = 0, m4 = 0, m6 = 0;
  for (Index j = 0; j < count; ++j) {
    const double v = x(0, j);
    if (v == 0.0) ++zeros;
    m2 += v * v;
    m3 += std::abs(v) * v * v;
    m4 += v * v * v * v;
    m6 += std::pow(v, 6);
  }
  const auto n = static_cast<std::size_t>(count);
  zeros /= count;
  m2 /= count;
  m3 /= count;
  m4 /= count;
  m6 /= count;
  CHECK(within_sigma(zeros, 1 - theta, std::sqrt(theta * (1 - theta)), n));
  // E x^2 = theta, Var x^2 = 3 theta - theta^2
  CHECK(within_sigma(m2, theta, std::sqrt(3 * theta - theta * theta), n));
  // E |x|^3 = theta * 2^{3/2} / sqrt(pi), E x^6 = 15 theta
  const double g1 = std::pow(2.0, 1.5) / std::sqrt(std::numbers::pi);
  CHECK(within_sigma(m3, theta * g1, std::sqrt(15 * theta - theta * theta * g1 * g1), n));
  (void)m4;
  (void)m6;
}

TEST_CASE("Bernoulli-Gaussian rejects theta outside (0, 1)") {
  CHECK_THROWS(sample_bernoulli_gaussian(3, 0.0, 4, std::uint64_t{1}));
  CHECK_THROWS(sample_bernoulli_gaussian(3, 1.0, 4, std::uint64_t{1}));
  CHECK_THROWS(sample_bernoulli_gaussian(3, -0.2, 4, std::uint64_t{1}));
}

TEST_CASE("synthetic stream: isometry, determinism, sizes") {
  const SyntheticModel model = SyntheticModel::make(10, 0.3, 7);
  CHECK(orthogonality_defect(model.d_true) < tol::orthogonality);
  SyntheticStream a(model, 4, 25), b(model, 4, 25);
  std::size_t count = 0;
  while (auto ba = a.next()) {
    auto bb = b.next();
    REQUIRE(bb);
    ++count;
    CHECK(ba->t == count);
    CHECK(ba->size() == 4);
    CHECK(ba->dim() == 10);
    CHECK((ba->samples - bb->samples).norm() == 0.0);
    CHECK(std::abs(ba->samples.norm() - a.last_codes().norm()) < 1e-9);
    for (Index j = 0; j < 4; ++j)
      CHECK(std::abs(ba->samples.col(j).norm() - a.last_codes().col(j).norm()) < 1e-10);
    CHECK((ba->samples - model.d_true * a.last_codes()).norm() < 1e-12);
  }
  CHECK(count == 25);
  CHECK_FALSE(b.next());
}

TEST_CASE("very sparse synthetic stream has mostly zero columns") {
  const SyntheticModel model = SyntheticModel::make(10, 0.01, 3);
  SyntheticStream s(model, 10000, 1);
  const Mat y = s.next()->samples;
  std::size_t zero_cols = 0;
  for (Index j = 0; j < y.cols(); ++j)
    if (y.col(j).norm() < 1e-12) ++zero_cols;
  const double p = std::pow(0.99, 10);
  const double frac = static_cast<double>(zero_cols) / 10000.0;
  CHECK(frac >= 0.8);
  CHECK(within_sigma(frac, p, std::sqrt(p * (1 - p)), 10000));
}

TEST_CASE("synthetic model validation") {
  CHECK_THROWS(SyntheticModel::make(5, 1.5, 1));
  SyntheticModel m = SyntheticModel::make(3, 0.2, 1);
  m.d_true(0, 0) += 0.1;
  CHECK_THROWS(m.validate());
}

TEST_CASE("sensor csv: missing cells and header-only file") {
  const SensorDataset ds = parse_sensor_csv("a,b\n1,2\n,4\n5,6\n");
  CHECK(ds.time_count() == 3);
  CHECK(ds.sensor_count() == 2);
  CHECK(ds.missing_count() == 1);
  CHECK(ds.missing_mask(1, 0));
  CHECK(std::isnan(ds.readings(1, 0)));
  CHECK(ds.sensor_ids == std::vector<std::string>{"a", "b"});

  try {
    parse_sensor_csv("a,b\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("no data rows") != std::string::npos);
  }
}

TEST_CASE("sensor csv: timestamp column, NaN markers and located errors") {
  const SensorDataset ds = parse_sensor_csv("timestamp,s1,s2,s3\n2020-01-01 00:00,1,NaN,3\n2020-01-01 01:00,nan,5,6\n");
  CHECK(ds.sensor_count() == 3);
  CHECK(ds.timestamps.front() == "2020-01-01 00:00");
  CHECK(ds.missing_count() == 2);

  try {
    parse_sensor_csv("a,b\n1,2\n3,x\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.row == 3);
    CHECK(e.column == 2);
  }
  try {
    parse_sensor_csv("a,b\n1,2\n3\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.row == 3);
  }
}

TEST_CASE("sensor csv round trip") {
  Rng rng(5);
  SensorDataset ds;
  ds.readings = gaussian_matrix(7, 4, rng) * 10.0;
  ds.missing_mask.setConstant(7, 4, false);
  ds.readings(2, 1) = std::nan("");
  ds.missing_mask(2, 1) = true;
  ds.sensor_ids = {"w", "x", "y", "z"};
  for (int i = 0; i < 7; ++i) ds.timestamps.push_back("t" + std::to_string(i));

  const auto path = std::filesystem::temp_directory_path() / "orthostream_roundtrip.csv";
  write_sensor_csv(ds, path);
  const SensorDataset back = load_sensor_csv(path);
  std::filesystem::remove(path);
  CHECK(back.sensor_ids == ds.sensor_ids);
  CHECK(back.timestamps == ds.timestamps);
  CHECK((back.missing_mask == ds.missing_mask).all());
  for (Index r = 0; r < 7; ++r)
    for (Index c = 0; c < 4; ++c)
      if (!ds.missing_mask(r, c)) CHECK(std::abs(back.readings(r, c) - ds.readings(r, c)) < 1e-9);
}

TEST_CASE("row-mean imputation") {
  SensorDataset ds = parse_sensor_csv("a,b,c\n1,,3\n4,5,6\n");
  const SensorDataset imp = impute_row_mean(ds);
  CHECK(imp.imputed);
  CHECK(imp.readings(0, 1) == doctest::Approx(2.0));
  CHECK((imp.readings.row(1) - ds.readings.row(1)).norm() == 0.0);
  CHECK(imp.missing_count() == 1);  // mask is kept

  const SensorDataset twice = impute_row_mean(imp);
  CHECK((twice.readings - imp.readings).norm() == 0.0);

  CHECK_THROWS(impute_row_mean(parse_sensor_csv("a,b\n,\n1,2\n")));
}

TEST_CASE("row-mean imputation matches a recomputed oracle") {
  Rng rng(8);
  std::bernoulli_distribution miss(0.2);
  SensorDataset ds;
  ds.readings = gaussian_matrix(10, 5, rng);
  ds.missing_mask.setConstant(10, 5, false);
  for (Index r = 0; r < 10; ++r)
    for (Index c = 1; c < 5; ++c)  // keep column 0 so no row is fully missing
      if (miss(rng)) {
        ds.readings(r, c) = std::nan("");
        ds.missing_mask(r, c) = true;
      }
  for (int i = 0; i < 5; ++i) ds.sensor_ids.push_back(std::to_string(i));
  for (int i = 0; i < 10; ++i) ds.timestamps.push_back(std::to_string(i));
  const SensorDataset imp = impute_row_mean(ds);
  CHECK(imp.readings.allFinite());
  for (Index r = 0; r < 10; ++r) {
    double sum = 0;
    int n = 0;
    for (Index c = 0; c < 5; ++c)
      if (!ds.missing_mask(r, c)) {
        sum += ds.readings(r, c);
        ++n;
      }
    for (Index c = 0; c < 5; ++c)
      if (ds.missing_mask(r, c)) CHECK(imp.readings(r, c) == doctest::Approx(sum / n).epsilon(1e-14));
  }
}

TEST_CASE("batching the sensor stream") {
  auto make = [](Index rows) {
    SensorDataset ds;
    ds.readings = Mat::Random(rows, 3);
    ds.missing_mask.setConstant(rows, 3, false);
    ds.imputed = true;
    ds.sensor_ids = {"a", "b", "c"};
    for (Index i = 0; i < rows; ++i) ds.timestamps.push_back(std::to_string(i));
    return ds;
  };
  const SensorStream s10 = batch_sensor_stream(make(10), 4, 3);
  CHECK(s10.init_block.cols() == 4);
  CHECK(s10.init_block.rows() == 3);
  REQUIRE(s10.batches.size() == 2);
  CHECK(s10.batches[0].size() == 3);
  CHECK(s10.batches[1].size() == 3);

  const SensorStream s11 = batch_sensor_stream(make(11), 4, 3);
  REQUIRE(s11.batches.size() == 3);
  CHECK(s11.batches[2].size() == 1);

  const SensorDataset big = make(4593);
  const SensorStream airly_shape = batch_sensor_stream(big, 100, 6);
  CHECK(airly_shape.batches.size() == 749);
  CHECK(airly_shape.batches.back().size() == 5);
  CHECK(airly_shape.batches.back().t == 749);
  // columns are time samples in order
  CHECK((airly_shape.batches[0].samples.col(0) - big.readings.row(100).transpose()).norm() == 0.0);

  CHECK_THROWS(batch_sensor_stream(make(5), 4, 3));
  SensorDataset nan = make(10);
  nan.readings(6, 1) = std::nan("");
  CHECK_THROWS(batch_sensor_stream(nan, 4, 3));
}

TEST_CASE("init block means") {
  SensorDataset ds = parse_sensor_csv("a,b\n1,10\n3,20\n100,100\n");
  const Vec m = init_block_means(ds, 2);
  CHECK(m(0) == doctest::Approx(2));
  CHECK(m(1) == doctest::Approx(15));
}
