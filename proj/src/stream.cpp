#include "orthostream/stream.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace ortho {

std::optional<MiniBatch> VectorSource::next() {
  if (pos_ >= batches_.size()) return std::nullopt;
  return batches_[pos_++];
}

Mat sample_bernoulli_gaussian(Index n, double theta, Index count, Rng& rng) {
  if (!(theta > 0.0 && theta < 1.0))
    throw std::invalid_argument("sample_bernoulli_gaussian: theta must lie in (0, 1)");
  if (n < 1 || count < 0) throw std::invalid_argument("sample_bernoulli_gaussian: bad shape");
  std::bernoulli_distribution support(theta);
  std::normal_distribution<double> normal(0.0, 1.0);
  Mat x(n, count);
  for (Index j = 0; j < count; ++j) {
    for (Index i = 0; i < n; ++i) {
      // draw both so the Gaussian stream stays aligned regardless of the mask
      const bool b = support(rng);
      const double g = normal(rng);
      x(i, j) = b ? g : 0.0;
    }
  }
  return x;
}

Mat sample_bernoulli_gaussian(Index n, double theta, Index count, std::uint64_t seed) {
  Rng rng(seed);
  return sample_bernoulli_gaussian(n, theta, count, rng);
}

SyntheticModel SyntheticModel::make(Index n, double theta, std::uint64_t seed) {
  SyntheticModel m;
  m.n = n;
  m.theta = theta;
  m.seed = seed;
  m.d_true = random_orthogonal(n, mix_seed(seed, 0x5eed0001));
  m.validate();
  return m;
}

void SyntheticModel::validate() const {
  if (n < 1) throw std::invalid_argument("SyntheticModel: n must be >= 1");
  if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("SyntheticModel: theta must lie in (0, 1)");
  if (d_true.rows() != n || d_true.cols() != n || !is_orthogonal(d_true))
    throw std::invalid_argument("SyntheticModel: d_true must be an n x n orthogonal matrix");
}

SyntheticStream::SyntheticStream(SyntheticModel model, Index batch_size, std::size_t total_batches)
    : model_(std::move(model)),
      batch_size_(batch_size),
      total_(total_batches),
      rng_(mix_seed(model_.seed, 0x5eed0002)) {
  model_.validate();
  if (batch_size_ < 1) throw std::invalid_argument("SyntheticStream: batch_size must be >= 1");
}

std::optional<MiniBatch> SyntheticStream::next() {
  if (emitted_ >= total_) return std::nullopt;
  last_codes_ = sample_bernoulli_gaussian(model_.n, model_.theta, batch_size_, rng_);
  ++emitted_;
  return MiniBatch{emitted_, model_.d_true * last_codes_};
}

// --- sensor CSV -----------------------------------------------------------

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  std::string out(s.substr(b, e - b));
  if (out.size() >= 2 && out.front() == '"' && out.back() == '"') out = out.substr(1, out.size() - 2);
  return out;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return fields;
}

bool is_missing_marker(const std::string& cell) {
  return cell.empty() || cell == "NaN" || cell == "nan";
}

bool is_label_header(std::string cell) {
  std::transform(cell.begin(), cell.end(), cell.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return cell == "timestamp" || cell == "time" || cell == "date" || cell == "datetime";
}

std::optional<double> parse_number(const std::string& cell) {
  double v = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (!cell.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace

SensorDataset parse_sensor_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;

  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      header = split_fields(line);
      break;
    }
  }
  if (header.empty()) throw ParseError("sensor csv: missing header row", 1, 1);

  const bool has_labels = is_label_header(header.front());
  const std::size_t first_value = has_labels ? 1 : 0;
  if (header.size() <= first_value) throw ParseError("sensor csv: zero sensors in header", line_no, 1);

  SensorDataset ds;
  ds.sensor_ids.assign(header.begin() + static_cast<std::ptrdiff_t>(first_value), header.end());
  const std::size_t sensors = ds.sensor_ids.size();

  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      std::ostringstream msg;
      msg << "sensor csv: ragged row at line " << line_no << " (expected " << header.size()
          << " fields, got " << fields.size() << ")";
      throw ParseError(msg.str(), line_no, std::min(fields.size(), header.size()) + 1);
    }
    std::vector<double> row(sensors);
    for (std::size_t c = 0; c < sensors; ++c) {
      const std::string& cell = fields[c + first_value];
      if (is_missing_marker(cell)) {
        row[c] = std::numeric_limits<double>::quiet_NaN();
        continue;
      }
      auto v = parse_number(cell);
      if (!v) {
        std::ostringstream msg;
        msg << "sensor csv: non-numeric cell '" << cell << "' at line " << line_no << ", column "
            << (c + first_value + 1);
        throw ParseError(msg.str(), line_no, c + first_value + 1);
      }
      row[c] = *v;
    }
    ds.timestamps.push_back(has_labels ? fields.front() : std::to_string(rows.size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("sensor csv: no data rows", line_no, 1);

  const auto t = static_cast<Index>(rows.size());
  const auto s = static_cast<Index>(sensors);
  ds.readings.resize(t, s);
  ds.missing_mask.resize(t, s);
  for (Index i = 0; i < t; ++i) {
    for (Index j = 0; j < s; ++j) {
      const double v = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      ds.readings(i, j) = v;
      ds.missing_mask(i, j) = std::isnan(v);
    }
  }
  return ds;
}

SensorDataset load_sensor_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("sensor csv: cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_sensor_csv(buf.str());
}

std::string format_sensor_csv(const SensorDataset& ds) {
  std::ostringstream out;
  out.precision(17);
  out << "timestamp";
  for (const auto& id : ds.sensor_ids) out << ',' << id;
  out << '\n';
  for (Index i = 0; i < ds.time_count(); ++i) {
    out << ds.timestamps[static_cast<std::size_t>(i)];
    for (Index j = 0; j < ds.sensor_count(); ++j) {
      out << ',';
      const double v = ds.readings(i, j);
      if (!std::isnan(v)) out << v;
    }
    out << '\n';
  }
  return out.str();
}

void write_sensor_csv(const SensorDataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("sensor csv: cannot write " + path.string());
  out << format_sensor_csv(ds);
}

SensorDataset impute_row_mean(const SensorDataset& ds) {
  SensorDataset out = ds;
  for (Index i = 0; i < ds.time_count(); ++i) {
    double sum = 0.0;
    Index present = 0;
    for (Index j = 0; j < ds.sensor_count(); ++j) {
      if (!ds.missing_mask(i, j)) {
        sum += ds.readings(i, j);
        ++present;
      }
    }
    if (present == 0)
      throw std::runtime_error("impute_row_mean: every sensor is missing at timestamp " +
                               ds.timestamps[static_cast<std::size_t>(i)]);
    const double mean = sum / static_cast<double>(present);
    for (Index j = 0; j < ds.sensor_count(); ++j)
      if (ds.missing_mask(i, j)) out.readings(i, j) = mean;
  }
  out.imputed = true;
  return out;
}

SensorStream batch_sensor_stream(const SensorDataset& ds, Index init_count, Index batch_size) {
  if (init_count < 1 || batch_size < 1)
    throw std::invalid_argument("batch_sensor_stream: init_count and batch_size must be >= 1");
  if (init_count + batch_size > ds.time_count())
    throw std::invalid_argument("batch_sensor_stream: init_count + batch_size exceeds the number of readings");
  if (!ds.readings.allFinite())
    throw std::invalid_argument("batch_sensor_stream: dataset still has missing readings; impute first");

  SensorStream s;
  s.init_block = ds.readings.topRows(init_count).transpose();
  std::size_t t = 0;
  for (Index start = init_count; start < ds.time_count(); start += batch_size) {
    const Index len = std::min(batch_size, ds.time_count() - start);
    s.batches.push_back(MiniBatch{++t, ds.readings.middleRows(start, len).transpose()});
  }
  return s;
}

Vec init_block_means(const SensorDataset& ds, Index init_count) {
  if (init_count < 1 || init_count > ds.time_count())
    throw std::invalid_argument("init_block_means: bad init_count");
  return ds.readings.topRows(init_count).colwise().mean().transpose();
}

}  // namespace ortho
