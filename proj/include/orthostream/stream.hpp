#ifndef ORTHOSTREAM_STREAM_HPP
#define ORTHOSTREAM_STREAM_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "orthostream/matops.hpp"
#include "orthostream/rng.hpp"

namespace ortho {

/// One mini-batch Y_t; columns are samples.
struct MiniBatch {
  std::size_t t = 0;  // 1-based
  Mat samples;

  Index dim() const { return samples.rows(); }
  Index size() const { return samples.cols(); }
};

/// Pull-style sequence of mini-batches. Exhaustion is signalled by nullopt.
class BatchSource {
 public:
  virtual ~BatchSource() = default;
  virtual std::optional<MiniBatch> next() = 0;
};

/// Replays a fixed list of batches.
class VectorSource final : public BatchSource {
 public:
  explicit VectorSource(std::vector<MiniBatch> batches) : batches_(std::move(batches)) {}
  std::optional<MiniBatch> next() override;

 private:
  std::vector<MiniBatch> batches_;
  std::size_t pos_ = 0;
};

/// Entries b*g with b ~ Ber(theta), g ~ N(0,1); theta in (0,1).
Mat sample_bernoulli_gaussian(Index n, double theta, Index count, Rng& rng);
Mat sample_bernoulli_gaussian(Index n, double theta, Index count, std::uint64_t seed);

/// y = d_true * x with x i.i.d. Bernoulli-Gaussian.
struct SyntheticModel {
  Mat d_true;
  double theta = 0.3;
  Index n = 0;
  std::uint64_t seed = 0;

  /// Draws d_true from the Haar measure using a stream derived from seed.
  static SyntheticModel make(Index n, double theta, std::uint64_t seed);
  void validate() const;
};

class SyntheticStream final : public BatchSource {
 public:
  SyntheticStream(SyntheticModel model, Index batch_size, std::size_t total_batches);

  std::optional<MiniBatch> next() override;

  /// Sparse codes X_t behind the most recent batch.
  const Mat& last_codes() const { return last_codes_; }
  const SyntheticModel& model() const { return model_; }

 private:
  SyntheticModel model_;
  Index batch_size_;
  std::size_t total_;
  std::size_t emitted_ = 0;
  Rng rng_;
  Mat last_codes_;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t row, std::size_t column)
      : std::runtime_error(what), row(row), column(column) {}
  std::size_t row;     // 1-based line number in the file
  std::size_t column;  // 1-based field number
};

/// Time-major sensor readings (rows = timestamps, columns = sensors).
struct SensorDataset {
  std::vector<std::string> sensor_ids;
  std::vector<std::string> timestamps;
  Mat readings;                      // NaN where missing and not yet imputed
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> missing_mask;
  bool imputed = false;

  Index sensor_count() const { return readings.cols(); }
  Index time_count() const { return readings.rows(); }
  Index missing_count() const { return missing_mask.count(); }
};

/// Header row of sensor ids; an optional leading "timestamp"/"time"/"date"
/// column holds row labels. Empty, "NaN" and "nan" cells are missing.
SensorDataset load_sensor_csv(const std::filesystem::path& path);
SensorDataset parse_sensor_csv(const std::string& text);
void write_sensor_csv(const SensorDataset& ds, const std::filesystem::path& path);
std::string format_sensor_csv(const SensorDataset& ds);

/// Fills each missing cell with the mean of the non-missing cells in its row.
/// The mask is kept for audit.
SensorDataset impute_row_mean(const SensorDataset& ds);

struct SensorStream {
  Mat init_block;  // n x init_count, sensor-major
  std::vector<MiniBatch> batches;
};

/// First init_count readings form the init block; the rest are chunked into
/// batches of batch_size, the last one possibly shorter.
SensorStream batch_sensor_stream(const SensorDataset& ds, Index init_count, Index batch_size);

/// Per-sensor means of the first init_count readings.
Vec init_block_means(const SensorDataset& ds, Index init_count);

}  // namespace ortho

#endif  // ORTHOSTREAM_STREAM_HPP
