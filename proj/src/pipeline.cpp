#include "orthostream/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <iomanip>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "orthostream/montecarlo.hpp"
#include "orthostream/rng.hpp"
#include "orthostream/trace_io.hpp"

namespace ortho {

std::string to_string(Method m) {
  switch (m) {
    case Method::Proposed: return "proposed";
    case Method::SfwBaseline: return "sfw_baseline";
    case Method::L4Baseline: return "l4_baseline";
  }
  return "unknown";
}

Method method_from_string(const std::string& s) {
  if (s == "proposed") return Method::Proposed;
  if (s == "sfw_baseline" || s == "sfw") return Method::SfwBaseline;
  if (s == "l4_baseline" || s == "l4") return Method::L4Baseline;
  throw std::invalid_argument("unknown method \"" + s + "\" (expected proposed, sfw_baseline or l4_baseline)");
}

OdlProblem problem_for(Method m, Index n) {
  OdlProblem p;
  p.n = n;
  p.objective = m == Method::L4Baseline ? Objective::L4 : Objective::L3;
  p.update = m == Method::SfwBaseline ? UpdateRule::PlainCombination : UpdateRule::Polar;
  return p;
}

std::string config_hash(const nlohmann::json& config) { return git_blob_hash(config.dump()); }

const MethodCurves& SweepResult::curves_for(const std::string& method) const {
  for (const auto& c : curves)
    if (c.method == method) return c;
  throw std::out_of_range("no curves for method " + method);
}

const SensorMethodResult& SensorResult::method(const std::string& name) const {
  for (const auto& m : methods)
    if (m.method == name) return m;
  throw std::out_of_range("no sensor result for method " + name);
}

namespace {

// Generic helpers for json configs.
template <class T>
void read_opt(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

std::vector<Method> read_methods(const nlohmann::json& j, std::vector<Method> fallback) {
  if (!j.contains("methods")) return fallback;
  std::vector<Method> out;
  for (const auto& m : j.at("methods")) out.push_back(method_from_string(m.get<std::string>()));
  return out;
}

nlohmann::json methods_json(const std::vector<Method>& ms) {
  nlohmann::json out = nlohmann::json::array();
  for (auto m : ms) out.push_back(to_string(m));
  return out;
}

void reject_unknown_keys(const nlohmann::json& j, std::initializer_list<const char*> known, const char* who) {
  if (!j.is_object()) throw std::invalid_argument(std::string(who) + ": config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw std::invalid_argument(std::string(who) + ": unknown config key \"" + key + "\"");
  }
}

// Runs body(i) for i in [0, count) across OpenMP threads. Each index owns its
// output slot, so the reduction afterwards is in index order. The first
// exception (lowest index) is rethrown.
template <class Body>
void fan_out(std::size_t count, Body&& body) {
  std::vector<std::exception_ptr> errors(count);
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < static_cast<long>(count); ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::string trial_id(const std::string& method, std::size_t trial) {
  std::ostringstream s;
  s << method << "_trial" << std::setw(3) << std::setfill('0') << trial;
  return s.str();
}

// Averages a probed metric over runs of one method. Times are those where the
// first run has the metric.
Curve metric_curve(const std::vector<const TrialRun*>& runs, const std::string& metric) {
  if (runs.empty()) return {};
  std::vector<std::size_t> idx, t;
  const auto first = runs.front()->trace.metric(metric);
  for (std::size_t i = 0; i < first.size(); ++i)
    if (!std::isnan(first[i])) {
      idx.push_back(i);
      t.push_back(runs.front()->trace.records[i].t);
    }
  std::vector<std::vector<double>> series;
  for (const auto* r : runs) {
    const auto m = r->trace.metric(metric);
    std::vector<double> s;
    for (auto i : idx) s.push_back(i < m.size() ? m[i] : std::nan(""));
    series.push_back(std::move(s));
  }
  return average_curves(t, series);
}

Curve running_min_curve(const std::vector<const TrialRun*>& runs, const std::string& metric) {
  if (runs.empty()) return {};
  std::vector<std::size_t> idx, t;
  const auto first = runs.front()->trace.metric(metric);
  for (std::size_t i = 0; i < first.size(); ++i)
    if (!std::isnan(first[i])) {
      idx.push_back(i);
      t.push_back(runs.front()->trace.records[i].t);
    }
  std::vector<std::vector<double>> series;
  for (const auto* r : runs) {
    const auto m = r->trace.metric(metric);
    std::vector<double> s;
    double best = std::numeric_limits<double>::infinity();
    for (auto i : idx) {
      if (i < m.size() && !std::isnan(m[i])) best = std::min(best, m[i]);
      s.push_back(std::isinf(best) ? std::nan("") : best);
    }
    series.push_back(std::move(s));
  }
  return average_curves(t, series);
}

MethodCurves summarize_method(const std::string& method, const std::vector<TrialRun>& runs, bool with_gap) {
  std::vector<const TrialRun*> mine;
  for (const auto& r : runs)
    if (r.method == method) mine.push_back(&r);
  MethodCurves mc;
  mc.method = method;
  mc.error = metric_curve(mine, "error");
  if (!mc.error.t.empty()) {
    mc.final_error_mean = mc.error.mean.back();
    mc.final_error_stderr = mc.error.stderr_.back();
  }
  double init = 0.0;
  for (const auto* r : mine) init += r->initial_error;
  mc.initial_error_mean = mine.empty() ? 0.0 : init / static_cast<double>(mine.size());
  if (with_gap) {
    Curve g = running_min_curve(mine, "gap_reference");
    if (!g.t.empty()) mc.gap = std::move(g);
  }
  return mc;
}

nlohmann::json curves_summary(const std::vector<MethodCurves>& curves) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& c : curves) {
    nlohmann::json m = {{"final_error_mean", c.final_error_mean},
                        {"final_error_stderr", c.final_error_stderr},
                        {"initial_error_mean", c.initial_error_mean}};
    if (c.gap) {
      nlohmann::json g = nlohmann::json::array();
      for (std::size_t i = 0; i < c.gap->t.size(); ++i)
        g.push_back({{"t", c.gap->t[i]}, {"running_min_gap_mean", c.gap->mean[i]}, {"stderr", c.gap->stderr_[i]}});
      m["gap_reference"] = g;
    }
    out[c.method] = m;
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------- synthetic

void SyntheticConfig::validate() const {
  if (n < 2) throw std::invalid_argument("synthetic config: n must be >= 2");
  if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("synthetic config: theta must lie in (0, 1)");
  if (batch_size < 1) throw std::invalid_argument("synthetic config: batch_size must be >= 1");
  if (total_batches < 1) throw std::invalid_argument("synthetic config: total_batches must be >= 1");
  if (trials < 1) throw std::invalid_argument("synthetic config: trials must be >= 1");
  if (methods.empty()) throw std::invalid_argument("synthetic config: methods is empty");
  if (error_cadence < 1) throw std::invalid_argument("synthetic config: error_cadence must be >= 1");
  if (!std::is_sorted(gap_probe_times.begin(), gap_probe_times.end()))
    throw std::invalid_argument("synthetic config: gap_probe_times must be sorted");
  if (!gap_probe_times.empty() && gap_reference_samples < 2)
    throw std::invalid_argument("synthetic config: gap_reference_samples must be >= 2");
}

nlohmann::json SyntheticConfig::to_json() const {
  return {{"experiment", "synthetic"},
          {"n", n},
          {"theta", theta},
          {"batch_size", batch_size},
          {"total_batches", total_batches},
          {"trials", trials},
          {"seed", seed},
          {"methods", methods_json(methods)},
          {"error_cadence", error_cadence},
          {"gap_probe_times", gap_probe_times},
          {"gap_reference_samples", gap_reference_samples}};
}

SyntheticConfig SyntheticConfig::from_json(const nlohmann::json& j) {
  reject_unknown_keys(j,
                      {"experiment", "n", "theta", "batch_size", "total_batches", "trials", "seed", "methods",
                       "error_cadence", "gap_probe_times", "gap_probes", "gap_reference_samples"},
                      "synthetic config");
  SyntheticConfig c;
  read_opt(j, "n", c.n);
  read_opt(j, "theta", c.theta);
  read_opt(j, "batch_size", c.batch_size);
  read_opt(j, "total_batches", c.total_batches);
  read_opt(j, "trials", c.trials);
  read_opt(j, "seed", c.seed);
  read_opt(j, "error_cadence", c.error_cadence);
  read_opt(j, "gap_reference_samples", c.gap_reference_samples);
  c.methods = read_methods(j, c.methods);
  if (j.contains("gap_probe_times")) {
    read_opt(j, "gap_probe_times", c.gap_probe_times);
  } else if (j.contains("gap_probes")) {
    c.gap_probe_times = log_spaced_times(c.total_batches, j.at("gap_probes").get<std::size_t>(), {100, 500, 1000, 3000});
  }
  c.validate();
  return c;
}

std::vector<std::size_t> log_spaced_times(std::size_t total, std::size_t count,
                                          const std::vector<std::size_t>& extra) {
  std::vector<std::size_t> out;
  if (total == 0) return out;
  if (count >= 2) {
    const double lt = std::log(static_cast<double>(total));
    for (std::size_t i = 0; i < count; ++i) {
      const double v = std::exp(lt * static_cast<double>(i) / static_cast<double>(count - 1));
      out.push_back(std::clamp<std::size_t>(static_cast<std::size_t>(std::llround(v)), 1, total));
    }
  } else if (count == 1) {
    out.push_back(total);
  }
  for (auto e : extra)
    if (e >= 1 && e <= total) out.push_back(e);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

SweepResult run_synthetic(const SyntheticConfig& cfg) {
  cfg.validate();
  const std::size_t nm = cfg.methods.size();
  std::vector<TrialRun> runs(cfg.trials * nm);

  fan_out(cfg.trials, [&](std::size_t trial) {
    const std::uint64_t trial_seed = mix_seed(cfg.seed, trial);
    const SyntheticModel model = SyntheticModel::make(cfg.n, cfg.theta, trial_seed);
    const Mat d0 = random_orthogonal(cfg.n, mix_seed(trial_seed, 0x1d0));
    const mc::BgSampler sampler{model.d_true, cfg.theta};
    const mc::Plan plan{cfg.gap_reference_samples, mix_seed(trial_seed, 0x9a9), 1024};

    for (std::size_t k = 0; k < nm; ++k) {
      const Method method = cfg.methods[k];
      const OdlProblem problem = problem_for(method, cfg.n);
      const ProblemOracle oracle =
          odl_oracle(problem, std::make_shared<PolarUpdateLog>(mix_seed(trial_seed, 0x901a)));
      SyntheticStream stream(model, cfg.batch_size, cfg.total_batches);

      RunOptions opts;
      opts.probes.push_back([&](std::size_t t, const SfwState& s, std::map<std::string, double>& out) {
        if (t % cfg.error_cadence == 0 || t == cfg.total_batches) out["error"] = recovery_error(s.x, model.d_true);
      });
      if (!cfg.gap_probe_times.empty()) {
        opts.probes.push_back([&](std::size_t t, const SfwState& s, std::map<std::string, double>& out) {
          if (!std::binary_search(cfg.gap_probe_times.begin(), cfg.gap_probe_times.end(), t)) return;
          const Mat ref = mc::parallel::gradient(s.x, problem, sampler, plan).mean;
          out["gap_reference"] = fw_gap_estimate(s.x, ref, oracle);
        });
      }

      RunResult rr = run(stream, d0, oracle, problem.schedule(), opts);
      TrialRun& tr = runs[trial * nm + k];
      tr.trial = trial;
      tr.method = to_string(method);
      tr.id = trial_id(tr.method, trial);
      tr.initial_error = recovery_error(d0, model.d_true);
      tr.trace = std::move(rr.trace);
      tr.trace.metadata["id"] = tr.id;
      tr.trace.metadata["trial"] = trial;
      tr.trace.metadata["method"] = tr.method;
      tr.trace.metadata["problem"] = problem.to_json();
      tr.trace.metadata["initial_error"] = tr.initial_error;
    }
  });

  SweepResult r;
  r.config = cfg.to_json();
  r.config_hash = config_hash(r.config);
  for (auto& tr : runs) tr.trace.metadata["config_hash"] = r.config_hash;
  r.runs = std::move(runs);
  for (auto m : cfg.methods) r.curves.push_back(summarize_method(to_string(m), r.runs, !cfg.gap_probe_times.empty()));
  r.summary = {{"config", r.config},
               {"config_hash", r.config_hash},
               {"metric", "recovery error |1 - ||D_t^T D_true||_4^4 / N|"},
               {"methods", curves_summary(r.curves)}};
  nlohmann::json ids = nlohmann::json::array();
  for (const auto& tr : r.runs) ids.push_back(tr.id);
  r.summary["trace_ids"] = ids;
  return r;
}

// ------------------------------------------------------------------ sensor

void SensorConfig::validate() const {
  if (use_last < 0) throw std::invalid_argument("sensor config: use_last must be >= 0");
  if (init_count < 1) throw std::invalid_argument("sensor config: init_count must be >= 1");
  if (batch_size < 1) throw std::invalid_argument("sensor config: batch_size must be >= 1");
  if (eta0.empty()) throw std::invalid_argument("sensor config: eta0 is empty");
  for (auto e : eta0)
    if (e < 1) throw std::invalid_argument("sensor config: every eta0 must be >= 1");
  if (methods.empty()) throw std::invalid_argument("sensor config: methods is empty");
  if (h < 1) throw std::invalid_argument("sensor config: h must be >= 1");
  for (auto t : transmit_thresholds)
    if (!(t >= 0.0)) throw std::invalid_argument("sensor config: transmit thresholds must be >= 0");
}

nlohmann::json SensorConfig::to_json() const {
  return {{"experiment", "sensor"},
          {"use_last", use_last},
          {"init_count", init_count},
          {"init_iterations", init_iterations},
          {"batch_size", batch_size},
          {"eta0", eta0},
          {"methods", methods_json(methods)},
          {"center", center},
          {"seed", seed},
          {"h", h},
          {"transmit_thresholds", transmit_thresholds}};
}

SensorConfig SensorConfig::from_json(const nlohmann::json& j) {
  reject_unknown_keys(j,
                      {"experiment", "use_last", "init_count", "init_iterations", "batch_size", "eta0", "methods", "center",
                       "seed", "h", "transmit_thresholds"},
                      "sensor config");
  SensorConfig c;
  read_opt(j, "use_last", c.use_last);
  read_opt(j, "init_count", c.init_count);
  read_opt(j, "init_iterations", c.init_iterations);
  read_opt(j, "batch_size", c.batch_size);
  read_opt(j, "eta0", c.eta0);
  read_opt(j, "center", c.center);
  read_opt(j, "seed", c.seed);
  read_opt(j, "h", c.h);
  read_opt(j, "transmit_thresholds", c.transmit_thresholds);
  c.methods = read_methods(j, c.methods);
  c.validate();
  return c;
}

namespace {

SensorDataset trailing_rows(SensorDataset ds, Index keep) {
  const Index total = ds.time_count();
  if (keep == 0 || keep == total) return ds;
  if (keep > total) {
    std::ostringstream msg;
    msg << "run_sensor: use_last=" << keep << " exceeds the " << total << " rows in the dataset";
    throw std::invalid_argument(msg.str());
  }
  const Index start = total - keep;
  ds.readings = Mat(ds.readings.bottomRows(keep));
  ds.missing_mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>(ds.missing_mask.bottomRows(keep));
  ds.timestamps.erase(ds.timestamps.begin(), ds.timestamps.begin() + start);
  return ds;
}

}  // namespace

SensorResult run_sensor(const SensorDataset& raw, const SensorConfig& cfg, const std::string& data_hash) {
  cfg.validate();
  const SensorDataset ds = trailing_rows(raw.imputed ? raw : impute_row_mean(raw), cfg.use_last);
  const Index n = ds.sensor_count();
  if (n < 2) throw std::invalid_argument("run_sensor: need at least 2 sensors");
  for (auto e : cfg.eta0)
    if (e > n) {
      std::ostringstream msg;
      msg << "run_sensor: eta0=" << e << " exceeds the sensor count " << n;
      throw std::invalid_argument(msg.str());
    }
  const SensorStream ss = batch_sensor_stream(ds, cfg.init_count, cfg.batch_size);
  const Vec offset = cfg.center ? init_block_means(ds, cfg.init_count) : Vec::Zero(n);
  const Mat init_block = ss.init_block.colwise() - offset;
  const Mat d_start = random_orthogonal(n, mix_seed(cfg.seed, 0x1d0));

  const std::size_t nm = cfg.methods.size();
  std::vector<SensorMethodResult> results(nm);

  fan_out(nm, [&](std::size_t k) {
    const Method method = cfg.methods[k];
    const OdlProblem problem = problem_for(method, n);
    const ProblemOracle oracle = odl_oracle(problem, std::make_shared<PolarUpdateLog>(mix_seed(cfg.seed, 0x901a)));
    const Schedule sched = problem.schedule();

    SensorMethodResult& out = results[k];
    out.method = to_string(method);
    SfwState state = SfwState::start(batch_initialize_from(init_block, problem, cfg.init_iterations, d_start));

    std::map<Index, RmseAccumulator> total;
    std::map<double, Mat> last_sent;
    for (auto thr : cfg.transmit_thresholds) {
      last_sent[thr] = state.x;
      out.transmissions[thr] = 0;
    }

    using clock = std::chrono::steady_clock;
    const auto start = clock::now();
    for (const MiniBatch& raw_batch : ss.batches) {
      const MiniBatch batch{raw_batch.t, raw_batch.samples.colwise() - offset};
      TraceRecord rec;
      rec.objective_estimate = oracle.sample_objective(state.x, batch);
      const StepReport rep = sfw_step(state, batch, oracle, sched);
      rec.t = state.grad.t;
      rec.fw_gap_estimate = rep.gap_estimate;

      for (auto eta : cfg.eta0) {
        RmseAccumulator inst;
        for (Index j = 0; j < batch.samples.cols(); ++j) {
          const SparseCode sc = sparse_code_and_reconstruct(state.x, batch.samples.col(j), eta);
          const Vec y = raw_batch.samples.col(j);
          inst.add(sc.y_hat + offset, y);
        }
        total[eta].add_squared(inst.residual_sq(), inst.reference_sq());
        const double v = inst.value();
        out.batch_rmse[eta].push_back(v);
        rec.metrics["rmse_eta" + std::to_string(eta)] = v;
      }
      for (auto& [thr, sent] : last_sent) {
        if ((state.x - sent).norm() > thr) {
          sent = state.x;
          ++out.transmissions[thr];
        }
      }
      rec.elapsed = std::chrono::duration<double>(clock::now() - start).count();
      out.trace.append(std::move(rec));
    }
    for (auto& [eta, acc] : total) out.rmse[eta] = acc.value();
    out.trace.metadata["method"] = out.method;
    out.trace.metadata["problem"] = problem.to_json();
  });

  SensorResult r;
  r.config = cfg.to_json();
  r.config_hash = config_hash(r.config);
  r.data_hash = data_hash;
  r.methods = std::move(results);

  nlohmann::json per_method = nlohmann::json::object();
  for (auto& m : r.methods) {
    m.trace.metadata["config_hash"] = r.config_hash;
    m.trace.metadata["data_hash"] = r.data_hash;
    nlohmann::json rows = nlohmann::json::array();
    for (auto eta : cfg.eta0)
      rows.push_back({{"eta0", eta}, {"compression_ratio", compression_ratio(n, eta)}, {"rmse", m.rmse.at(eta)}});
    nlohmann::json tx = nlohmann::json::array();
    for (const auto& [thr, count] : m.transmissions) tx.push_back({{"threshold", thr}, {"transmissions", count}});
    per_method[m.method] = {{"compression", rows},
                            {"dictionary_transmissions", tx},
                            {"cpu_seconds_per_batch",
                             m.trace.empty() ? 0.0 : m.trace.records.back().elapsed / static_cast<double>(m.trace.size())}};
  }

  // HLNDM of every other method against the first (reference) method, with
  // the other method's squared RMSE first so that a positive statistic means
  // the reference compresses better.
  nlohmann::json tests = nlohmann::json::array();
  if (r.methods.size() > 1 && ss.batches.size() > static_cast<std::size_t>(2 * cfg.h)) {
    const auto& ref = r.methods.front();
    for (std::size_t k = 1; k < r.methods.size(); ++k)
      for (auto eta : cfg.eta0) {
        const HlndmReport rep = hlndm(r.methods[k].batch_rmse.at(eta), ref.batch_rmse.at(eta), cfg.h);
        tests.push_back({{"reference", ref.method}, {"other", r.methods[k].method}, {"eta0", eta}, {"hlndm", rep.to_json()},
                         {"sign", "positive when the other method's squared RMSE exceeds the reference's"}});
      }
  }

  r.summary = {{"config", r.config},
               {"config_hash", r.config_hash},
               {"data_hash", r.data_hash},
               {"sensors", n},
               {"time_steps", ds.time_count()},
               {"imputed_cells", ds.missing_count()},
               {"stream_batches", ss.batches.size()},
               {"centering", cfg.center ? "init-block sensor means subtracted before coding, added back after"
                                        : "none"},
               {"transmission_note", "counts updates after the initial dictionary"},
               {"methods", per_method},
               {"hlndm", tests}};
  return r;
}

SensorDataset make_surrogate_sensor_dataset(Index sensors, Index times, std::uint64_t seed, double missing_fraction) {
  if (sensors < 1 || times < 1) throw std::invalid_argument("surrogate dataset: sizes must be positive");
  if (!(missing_fraction >= 0.0 && missing_fraction < 1.0))
    throw std::invalid_argument("surrogate dataset: missing_fraction must lie in [0, 1)");
  Rng rng(mix_seed(seed, 0x5e45));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  // Latent drivers: a shared daily cycle, slow AR(1) regional pollution
  // episodes and faster local fluctuations.
  const Index k = 6;
  Mat loadings(sensors, k);
  for (Index i = 0; i < sensors; ++i) {
    loadings(i, 0) = 0.6 + 0.4 * unif(rng);
    for (Index j = 1; j < k; ++j) loadings(i, j) = std::max(0.0, 0.5 + 0.5 * normal(rng));
  }
  Vec level(sensors);
  for (Index i = 0; i < sensors; ++i) level(i) = 15.0 + 10.0 * unif(rng);

  SensorDataset ds;
  ds.readings.resize(times, sensors);
  ds.missing_mask.setConstant(times, sensors, false);
  Vec f = Vec::Zero(k);
  const double phi[] = {0.0, 0.995, 0.98, 0.95, 0.9, 0.8};
  const double scale[] = {6.0, 4.0, 3.0, 2.0, 1.5, 1.0};
  for (Index t = 0; t < times; ++t) {
    f(0) = scale[0] * std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / 24.0);
    for (Index j = 1; j < k; ++j)
      f(j) = phi[j] * f(j) + scale[j] * std::sqrt(1.0 - phi[j] * phi[j]) * normal(rng);
    for (Index i = 0; i < sensors; ++i) {
      const double v = level(i) + loadings.row(i).dot(f) + 0.3 * normal(rng);
      ds.readings(t, i) = std::max(0.0, v);
    }
  }
  for (Index t = 0; t < times; ++t)
    for (Index i = 0; i < sensors; ++i)
      if (unif(rng) < missing_fraction) {
        ds.readings(t, i) = std::numeric_limits<double>::quiet_NaN();
        ds.missing_mask(t, i) = true;
      }
  for (Index i = 0; i < sensors; ++i) ds.sensor_ids.push_back("s" + std::to_string(i + 1));
  for (Index t = 0; t < times; ++t) ds.timestamps.push_back(std::to_string(t));
  return ds;
}

// -------------------------------------------------------------------- spca

void SpcaConfig::validate() const {
  if (n < 1 || q < 1 || q > n) throw std::invalid_argument("spca config: need 1 <= q <= n");
  if (batch_size < 1) throw std::invalid_argument("spca config: batch_size must be >= 1");
  if (total_batches < 1) throw std::invalid_argument("spca config: total_batches must be >= 1");
  if (trials < 1) throw std::invalid_argument("spca config: trials must be >= 1");
  if (!(mu > 0.0)) throw std::invalid_argument("spca config: mu must be > 0");
  if (!(lambda >= 0.0)) throw std::invalid_argument("spca config: lambda must be >= 0");
  if (error_cadence < 1) throw std::invalid_argument("spca config: error_cadence must be >= 1");
}

nlohmann::json SpcaConfig::to_json() const {
  return {{"experiment", "spca"},    {"n", n},         {"q", q},           {"batch_size", batch_size},
          {"total_batches", total_batches}, {"trials", trials}, {"mu", mu}, {"lambda", lambda},
          {"seed", seed},            {"error_cadence", error_cadence}};
}

SpcaConfig SpcaConfig::from_json(const nlohmann::json& j) {
  reject_unknown_keys(j,
                      {"experiment", "n", "q", "batch_size", "total_batches", "trials", "mu", "lambda", "seed",
                       "error_cadence"},
                      "spca config");
  SpcaConfig c;
  read_opt(j, "n", c.n);
  read_opt(j, "q", c.q);
  read_opt(j, "batch_size", c.batch_size);
  read_opt(j, "total_batches", c.total_batches);
  read_opt(j, "trials", c.trials);
  read_opt(j, "mu", c.mu);
  read_opt(j, "lambda", c.lambda);
  read_opt(j, "seed", c.seed);
  read_opt(j, "error_cadence", c.error_cadence);
  c.validate();
  return c;
}

SweepResult run_spca(const SpcaConfig& cfg) {
  cfg.validate();
  std::vector<TrialRun> runs(cfg.trials);
  const SpcaProblem problem{cfg.n, cfg.lambda, cfg.mu};
  Schedule sched;

  fan_out(cfg.trials, [&](std::size_t trial) {
    const std::uint64_t trial_seed = mix_seed(cfg.seed, trial);
    const SpcaModel model = SpcaModel::make(cfg.n, cfg.q, trial_seed);
    const Vec v1 = model.v1();
    Rng init_rng(mix_seed(trial_seed, 0x1d0));
    const Mat z0 = random_unit_vector(cfg.n, init_rng);
    const ProblemOracle oracle = spca_oracle(problem);
    CovarianceStream stream(model, cfg.batch_size, cfg.total_batches);

    RunOptions opts;
    opts.probes.push_back([&](std::size_t t, const SfwState& s, std::map<std::string, double>& out) {
      if (t % cfg.error_cadence == 0 || t == cfg.total_batches) {
        out["error"] = spca_recovery_error(s.x.col(0), v1);
        out["norm"] = s.x.norm();
      }
    });
    RunResult rr = run(stream, z0, oracle, sched, opts);
    TrialRun& tr = runs[trial];
    tr.trial = trial;
    tr.method = "proposed";
    tr.id = trial_id(tr.method, trial);
    tr.initial_error = spca_recovery_error(z0.col(0), v1);
    tr.trace = std::move(rr.trace);
    tr.trace.metadata["id"] = tr.id;
    tr.trace.metadata["trial"] = trial;
    tr.trace.metadata["initial_error"] = tr.initial_error;
  });

  SweepResult r;
  r.config = cfg.to_json();
  r.config_hash = config_hash(r.config);
  for (auto& tr : runs) tr.trace.metadata["config_hash"] = r.config_hash;
  r.runs = std::move(runs);
  r.curves.push_back(summarize_method("proposed", r.runs, false));
  double max_norm = 0.0;
  for (const auto& tr : r.runs)
    for (double v : tr.trace.metric("norm"))
      if (!std::isnan(v)) max_norm = std::max(max_norm, v);
  r.summary = {{"config", r.config},
               {"config_hash", r.config_hash},
               {"metric", "recovery error |1 - |z_t^T v1||"},
               {"max_iterate_norm", max_norm},
               {"methods", curves_summary(r.curves)}};
  nlohmann::json ids = nlohmann::json::array();
  for (const auto& tr : r.runs) ids.push_back(tr.id);
  r.summary["trace_ids"] = ids;
  return r;
}

// ----------------------------------------------------------------- outputs

void write_sweep(const SweepResult& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& tr : r.runs) write_text(dir / ("trace_" + tr.id + ".csv"), trace_to_csv(tr.trace));

  std::ostringstream curves;
  curves.precision(17);
  curves << "method,t,mean_error,stderr\n";
  for (const auto& c : r.curves)
    for (std::size_t i = 0; i < c.error.t.size(); ++i)
      curves << c.method << ',' << c.error.t[i] << ',' << c.error.mean[i] << ',' << c.error.stderr_[i] << '\n';
  write_text(dir / "curves.csv", curves.str());

  bool any_gap = false;
  std::ostringstream gaps;
  gaps.precision(17);
  gaps << "method,t,running_min_gap_mean,stderr\n";
  for (const auto& c : r.curves) {
    if (!c.gap) continue;
    any_gap = true;
    for (std::size_t i = 0; i < c.gap->t.size(); ++i)
      gaps << c.method << ',' << c.gap->t[i] << ',' << c.gap->mean[i] << ',' << c.gap->stderr_[i] << '\n';
  }
  if (any_gap) write_text(dir / "gap_curves.csv", gaps.str());
  write_text(dir / "summary.json", r.summary.dump(2) + "\n");
}

void write_sensor(const SensorResult& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& m : r.methods) write_text(dir / ("trace_" + m.method + ".csv"), trace_to_csv(m.trace));
  std::ostringstream curves;
  curves.precision(17);
  curves << "method,eta0,t,batch_rmse\n";
  for (const auto& m : r.methods)
    for (const auto& [eta, series] : m.batch_rmse)
      for (std::size_t i = 0; i < series.size(); ++i)
        curves << m.method << ',' << eta << ',' << m.trace.records[i].t << ',' << series[i] << '\n';
  write_text(dir / "curves.csv", curves.str());
  write_text(dir / "summary.json", r.summary.dump(2) + "\n");
}

}  // namespace ortho
