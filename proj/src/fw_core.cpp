#include "orthostream/fw_core.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

namespace ortho {

double Schedule::rho(std::size_t t) const {
  const double r = rho_scale * std::pow(static_cast<double>(t) + rho_offset, -rho_exponent);
  return clamp_rho ? std::min(1.0, r) : r;
}

double Schedule::gamma(std::size_t t) const {
  return gamma_scale * std::pow(static_cast<double>(t) + gamma_offset, -gamma_exponent);
}

nlohmann::json Schedule::to_json() const {
  return {{"rho_scale", rho_scale},       {"rho_offset", rho_offset},
          {"rho_exponent", rho_exponent}, {"gamma_scale", gamma_scale},
          {"gamma_offset", gamma_offset}, {"gamma_exponent", gamma_exponent},
          {"clamp_rho", clamp_rho}};
}

Schedule Schedule::from_json(const nlohmann::json& j) {
  Schedule s;
  s.rho_scale = j.value("rho_scale", s.rho_scale);
  s.rho_offset = j.value("rho_offset", s.rho_offset);
  s.rho_exponent = j.value("rho_exponent", s.rho_exponent);
  s.gamma_scale = j.value("gamma_scale", s.gamma_scale);
  s.gamma_offset = j.value("gamma_offset", s.gamma_offset);
  s.gamma_exponent = j.value("gamma_exponent", s.gamma_exponent);
  s.clamp_rho = j.value("clamp_rho", s.clamp_rho);
  return s;
}

StepReport sfw_step(SfwState& state, const MiniBatch& batch, const ProblemOracle& oracle,
                    const Schedule& sched) {
  if (batch.size() < 1) throw std::invalid_argument("sfw_step: empty mini-batch");

  const std::size_t t = state.grad.t + 1;
  StepReport rep;
  rep.rho = sched.rho(t);
  rep.gamma = sched.gamma(t);

  rep.batch_gradient = oracle.sample_gradient(state.x, batch);
  if (state.grad.g.size() == 0) state.grad.g = Mat::Zero(state.x.rows(), state.x.cols());
  state.grad.g = (1.0 - rep.rho) * state.grad.g + rep.rho * rep.batch_gradient;
  state.grad.t = t;

  rep.s = oracle.lmo(state.grad.g);
  if (oracle.contains && !oracle.contains(rep.s, tol::membership))
    throw ContractViolation("sfw_step: LMO returned a point outside the feasible set");
  rep.gap_estimate = inner(-state.grad.g, rep.s - state.x);

  Mat combined = (1.0 - rep.gamma) * state.x + rep.gamma * rep.s;
  state.x = oracle.update_map ? oracle.update_map(combined) : std::move(combined);
  if (oracle.contains && !oracle.contains(state.x, tol::membership))
    throw ContractViolation("sfw_step: update map produced an infeasible iterate");
  return rep;
}

double fw_gap_estimate(const Mat& x, const Mat& grad_ref, const ProblemOracle& oracle) {
  return inner(-grad_ref, oracle.lmo(grad_ref) - x);
}

void RunTrace::append(TraceRecord rec) {
  if (!records.empty() && rec.t <= records.back().t) {
    std::ostringstream msg;
    msg << "RunTrace: record t=" << rec.t << " does not follow t=" << records.back().t;
    throw ContractViolation(msg.str());
  }
  records.push_back(std::move(rec));
}

std::vector<double> RunTrace::metric(const std::string& name) const {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    auto it = r.metrics.find(name);
    out.push_back(it == r.metrics.end() ? std::numeric_limits<double>::quiet_NaN() : it->second);
  }
  return out;
}

RunResult run(BatchSource& stream, Mat x0, const ProblemOracle& oracle, const Schedule& sched,
              const RunOptions& options) {
  if (oracle.contains && !oracle.contains(x0, tol::membership))
    throw ContractViolation("run: initial point is outside the feasible set");

  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  RunResult result;
  SfwState state = SfwState::start(std::move(x0));

  std::size_t next_probe_idx = 0;
  auto probe_due = [&](std::size_t t) {
    if (options.probes.empty()) return false;
    if (!options.probe_times.empty()) {
      while (next_probe_idx < options.probe_times.size() && options.probe_times[next_probe_idx] < t)
        ++next_probe_idx;
      return next_probe_idx < options.probe_times.size() && options.probe_times[next_probe_idx] == t;
    }
    return options.cadence > 0 && t % options.cadence == 0;
  };

  while (auto batch = stream.next()) {
    TraceRecord rec;
    rec.objective_estimate = oracle.sample_objective ? oracle.sample_objective(state.x, *batch)
                                                     : std::numeric_limits<double>::quiet_NaN();
    const StepReport rep = sfw_step(state, *batch, oracle, sched);
    rec.t = state.grad.t;
    rec.fw_gap_estimate = rep.gap_estimate;
    if (probe_due(rec.t))
      for (const auto& probe : options.probes) probe(rec.t, state, rec.metrics);
    rec.elapsed = std::chrono::duration<double>(clock::now() - start).count();
    result.trace.append(std::move(rec));
  }
  result.x = std::move(state.x);
  return result;
}

}  // namespace ortho
