#ifndef ORTHOSTREAM_FW_CORE_HPP
#define ORTHOSTREAM_FW_CORE_HPP

#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "orthostream/matops.hpp"
#include "orthostream/stream.hpp"

namespace ortho {

/// Step weights rho_t = rho_scale (t + rho_offset)^(-rho_exponent) and
/// step sizes gamma_t = gamma_scale (t + gamma_offset)^(-gamma_exponent).
/// The defaults are 4 (t+1)^(-1/2) and 2 (t+2)^(-3/4).
///
/// rho_t exceeds 1 for t <= 14; with clamp_rho the weight is capped at 1 so
/// the gradient recursion stays a convex combination.
struct Schedule {
  double rho_scale = 4.0;
  double rho_offset = 1.0;
  double rho_exponent = 0.5;
  double gamma_scale = 2.0;
  double gamma_offset = 2.0;
  double gamma_exponent = 0.75;
  bool clamp_rho = true;

  double rho(std::size_t t) const;
  double gamma(std::size_t t) const;

  nlohmann::json to_json() const;
  static Schedule from_json(const nlohmann::json& j);
};

/// Running gradient estimate G_t; G_0 = 0.
struct GradientEstimate {
  Mat g;
  std::size_t t = 0;

  static GradientEstimate zeros(Index rows, Index cols) { return {Mat::Zero(rows, cols), 0}; }
};

/// Everything the engine needs to know about a problem over a convex set C.
struct ProblemOracle {
  std::function<Mat(const Mat& x, const MiniBatch& batch)> sample_gradient;
  std::function<double(const Mat& x, const MiniBatch& batch)> sample_objective;
  std::function<Mat(const Mat& g)> lmo;         // argmin over C of <g, s>
  std::function<Mat(const Mat& x)> update_map;  // the operator P; identity when empty
  std::function<bool(const Mat& x, double tolerance)> contains;
};

class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct SfwState {
  Mat x;
  GradientEstimate grad;

  static SfwState start(Mat x0) {
    const Index r = x0.rows(), c = x0.cols();
    return SfwState{std::move(x0), GradientEstimate::zeros(r, c)};
  }
};

struct StepReport {
  Mat s;               // LMO output S_t
  Mat batch_gradient;  // mini-batch gradient at x_{t-1}
  double gamma = 0.0;
  double rho = 0.0;
  double gap_estimate = 0.0;  // <-G_t, S_t - x_{t-1}>
};

/// One NoncvxSFW iteration: gradient recursion, LMO, combination and update
/// map. Advances state in place; state.grad.t becomes the new iteration index.
/// The caller guarantees state.x is feasible; an infeasible LMO output or
/// updated iterate throws ContractViolation.
StepReport sfw_step(SfwState& state, const MiniBatch& batch, const ProblemOracle& oracle,
                    const Schedule& sched);

/// <-grad_ref, lmo(grad_ref) - x>; the Frank-Wolfe gap when grad_ref is the
/// true gradient at x.
double fw_gap_estimate(const Mat& x, const Mat& grad_ref, const ProblemOracle& oracle);

struct TraceRecord {
  std::size_t t = 0;
  double objective_estimate = 0.0;  // sample objective of batch t at x_{t-1}
  double fw_gap_estimate = 0.0;     // from G_t at x_{t-1}
  std::map<std::string, double> metrics;
  double elapsed = 0.0;  // seconds since run start
};

struct RunTrace {
  std::vector<TraceRecord> records;
  nlohmann::json metadata = nlohmann::json::object();

  /// Throws ContractViolation unless rec.t is strictly larger than the last t.
  void append(TraceRecord rec);
  bool empty() const { return records.empty(); }
  std::size_t size() const { return records.size(); }

  /// Metric series by name; NaN where the metric was not probed.
  std::vector<double> metric(const std::string& name) const;
};

/// Probe evaluated on the iterate x_t after step t.
using Probe = std::function<void(std::size_t t, const SfwState& state, std::map<std::string, double>& out)>;

struct RunOptions {
  std::vector<Probe> probes;
  std::size_t cadence = 1;                // probe every `cadence` iterations
  std::vector<std::size_t> probe_times;   // sorted; when nonempty, overrides cadence
};

struct RunResult {
  RunTrace trace;
  Mat x;
};

/// Runs one sfw_step per batch until the source is exhausted.
RunResult run(BatchSource& stream, Mat x0, const ProblemOracle& oracle, const Schedule& sched,
              const RunOptions& options = {});

}  // namespace ortho

#endif  // ORTHOSTREAM_FW_CORE_HPP
