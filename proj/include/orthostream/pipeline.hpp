#ifndef ORTHOSTREAM_PIPELINE_HPP
#define ORTHOSTREAM_PIPELINE_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "orthostream/eval.hpp"
#include "orthostream/fw_core.hpp"
#include "orthostream/odl.hpp"
#include "orthostream/spca.hpp"
#include "orthostream/stream.hpp"

namespace ortho {

/// proposed: l3 + polar. sfw_baseline: l3 + plain combination.
/// l4_baseline: l4 + polar.
enum class Method { Proposed, SfwBaseline, L4Baseline };

std::string to_string(Method m);
Method method_from_string(const std::string& s);
OdlProblem problem_for(Method m, Index n);

/// One trace per (trial, method); the id names its trace file.
struct TrialRun {
  std::string id;
  std::size_t trial = 0;
  std::string method;
  RunTrace trace;
  double initial_error = 0.0;
};

struct MethodCurves {
  std::string method;
  Curve error;
  std::optional<Curve> gap;  // trial-averaged running-minimum reference gap
  double final_error_mean = 0.0;
  double final_error_stderr = 0.0;
  double initial_error_mean = 0.0;
};

struct SweepResult {
  nlohmann::json config;
  std::string config_hash;
  std::vector<TrialRun> runs;  // sorted by (trial, method order in config)
  std::vector<MethodCurves> curves;
  nlohmann::json summary;

  const MethodCurves& curves_for(const std::string& method) const;
};

// ---- synthetic benchmark ----

struct SyntheticConfig {
  Index n = 10;
  double theta = 0.3;
  Index batch_size = 10;
  std::size_t total_batches = 3000;
  std::size_t trials = 20;
  std::uint64_t seed = 1;
  std::vector<Method> methods{Method::Proposed, Method::SfwBaseline, Method::L4Baseline};
  std::size_t error_cadence = 1;
  // Reference Frank-Wolfe gap from a fresh Monte-Carlo gradient at x_t,
  // evaluated at gap_probe_times only. Empty times disable it.
  std::vector<std::size_t> gap_probe_times;
  std::size_t gap_reference_samples = 20000;

  void validate() const;
  nlohmann::json to_json() const;
  static SyntheticConfig from_json(const nlohmann::json& j);
};

/// Roughly `count` log-spaced times in [1, total], always including the
/// extra times that are <= total.
std::vector<std::size_t> log_spaced_times(std::size_t total, std::size_t count,
                                          const std::vector<std::size_t>& extra = {});

SweepResult run_synthetic(const SyntheticConfig& config);

// ---- sensor compression ----

struct SensorConfig {
  Index use_last = 0;  // keep only the trailing rows of the file; 0 keeps all
  Index init_count = 100;
  std::size_t init_iterations = 20;
  Index batch_size = 6;
  std::vector<Index> eta0{2, 8, 17, 35};
  std::vector<Method> methods{Method::Proposed, Method::SfwBaseline, Method::L4Baseline};
  bool center = false;  // subtract init-block sensor means before coding
  std::uint64_t seed = 1;
  Index h = 4;
  std::vector<double> transmit_thresholds{0.05, 0.1, 0.5};

  void validate() const;
  nlohmann::json to_json() const;
  static SensorConfig from_json(const nlohmann::json& j);
};

struct SensorMethodResult {
  std::string method;
  RunTrace trace;
  std::map<Index, double> rmse;                      // aggregate over the stream, by eta0
  std::map<Index, std::vector<double>> batch_rmse;   // per-batch RMSE series, by eta0
  std::map<double, std::size_t> transmissions;       // by threshold
};

struct SensorResult {
  nlohmann::json config;
  std::string config_hash;
  std::string data_hash;
  std::vector<SensorMethodResult> methods;
  nlohmann::json summary;

  const SensorMethodResult& method(const std::string& name) const;
};

/// Imputes a copy of raw, learns online per method and codes every streamed
/// sample with each eta0 using the dictionary learned on its batch.
SensorResult run_sensor(const SensorDataset& raw, const SensorConfig& config, const std::string& data_hash = "");

/// Sensor-like surrogate: positive smooth latent factors mixed into
/// `sensors` channels plus noise, with a fraction of cells missing.
SensorDataset make_surrogate_sensor_dataset(Index sensors, Index times, std::uint64_t seed,
                                            double missing_fraction = 0.005);

// ---- sparse PCA ----

struct SpcaConfig {
  Index n = 20;
  Index q = 3;
  Index batch_size = 10;
  std::size_t total_batches = 3000;
  std::size_t trials = 20;
  double mu = 0.2;
  double lambda = 1.0;
  std::uint64_t seed = 1;
  std::size_t error_cadence = 1;

  void validate() const;
  nlohmann::json to_json() const;
  static SpcaConfig from_json(const nlohmann::json& j);
};

/// Trace metrics: "error" and "norm" (Euclidean norm of z_t).
SweepResult run_spca(const SpcaConfig& config);

// ---- outputs ----

/// trace_<id>.csv per run, curves.csv (method,t,mean_error,stderr) and
/// summary.json. Creates dir if needed.
void write_sweep(const SweepResult& r, const std::filesystem::path& dir);
/// trace_<method>.csv, curves.csv (method,eta0,t,batch_rmse) and summary.json.
void write_sensor(const SensorResult& r, const std::filesystem::path& dir);

/// Hash stamped into outputs: git blob id of the canonical config dump.
std::string config_hash(const nlohmann::json& config);

}  // namespace ortho

#endif  // ORTHOSTREAM_PIPELINE_HPP
