#include <exception>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "orthostream/pipeline.hpp"
#include "orthostream/selfcheck.hpp"
#include "orthostream/trace_io.hpp"

namespace fs = std::filesystem;

namespace {

nlohmann::json load_config(const std::string& path) {
  try {
    return nlohmann::json::parse(ortho::read_text(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

void print_sweep(const ortho::SweepResult& r) {
  for (const auto& c : r.curves)
    std::cout << c.method << ": initial error " << c.initial_error_mean << ", final error " << c.final_error_mean
              << " (stderr " << c.final_error_stderr << ")\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Streaming orthogonal dictionary learning with stochastic Frank-Wolfe"};
  app.require_subcommand(1);

  std::string config_path, data_path, out_dir = "out";

  auto* synth = app.add_subcommand("synth", "multi-trial synthetic recovery benchmark");
  synth->add_option("--config", config_path, "experiment config JSON")->required()->check(CLI::ExistingFile);
  synth->add_option("--out", out_dir, "output directory")->capture_default_str();

  auto* sensor = app.add_subcommand("sensor", "sensor-data compression workflow");
  sensor->add_option("--data", data_path, "readings CSV (timestamps x sensors)")->required()->check(CLI::ExistingFile);
  sensor->add_option("--config", config_path, "experiment config JSON")->required()->check(CLI::ExistingFile);
  sensor->add_option("--out", out_dir, "output directory")->capture_default_str();

  auto* spca = app.add_subcommand("spca", "sparse PCA study");
  spca->add_option("--config", config_path, "experiment config JSON")->required()->check(CLI::ExistingFile);
  spca->add_option("--out", out_dir, "output directory")->capture_default_str();

  std::uint64_t check_seed = 7;
  auto* check = app.add_subcommand("check", "run invariant and oracle self-checks");
  check->add_option("--seed", check_seed, "seed for the check instances")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth) {
      const auto cfg = ortho::SyntheticConfig::from_json(load_config(config_path));
      const auto r = ortho::run_synthetic(cfg);
      ortho::write_sweep(r, out_dir);
      print_sweep(r);
      std::cout << "wrote " << r.runs.size() << " traces to " << out_dir << "\n";
    } else if (*sensor) {
      const auto cfg = ortho::SensorConfig::from_json(load_config(config_path));
      const std::string text = ortho::read_text(data_path);
      const auto ds = ortho::parse_sensor_csv(text);
      const auto r = ortho::run_sensor(ds, cfg, ortho::git_blob_hash(text));
      ortho::write_sensor(r, out_dir);
      for (const auto& m : r.methods) {
        std::cout << m.method << ":";
        for (const auto& [eta, v] : m.rmse) std::cout << " eta0=" << eta << " rmse=" << 100.0 * v << "%";
        std::cout << "\n";
      }
      std::cout << "wrote results to " << out_dir << "\n";
    } else if (*spca) {
      const auto cfg = ortho::SpcaConfig::from_json(load_config(config_path));
      const auto r = ortho::run_spca(cfg);
      ortho::write_sweep(r, out_dir);
      print_sweep(r);
      std::cout << "wrote " << r.runs.size() << " traces to " << out_dir << "\n";
    } else if (*check) {
      bool ok = true;
      for (const auto& c : ortho::run_self_checks(check_seed)) {
        std::cout << (c.passed ? "PASS " : "FAIL ") << c.name;
        if (!c.passed) std::cout << ": " << c.detail;
        std::cout << "\n";
        ok = ok && c.passed;
      }
      return ok ? 0 : 1;
    }
  } catch (const ortho::ParseError& e) {
    std::cerr << "error: " << data_path << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
