#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "rvode/classify.hpp"
#include "rvode/nonlinearity.hpp"
#include "rvode/ode.hpp"
#include "rvode/perturbation.hpp"
#include "rvode/toml_lite.hpp"

namespace rvode {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ModelSpec {
  Family family = Family::PurePower;
  double a = 1.0;
  double beta = 3.0;
  double beta1 = 0.0;
  double beta2 = 0.0;
  std::optional<double> crossover;  // family default when absent

  NonlinearityModel build() const;
};

struct ForcingSpec {
  std::string kind = "zero";
  double c = 0.0, p = 0.0;
  double xi = 1.0;            // zero-limit-synthetic
  std::string growth = "1+t"; // oscillating / spiked
  std::optional<int> n;       // oscillating; default from beta
  double base_c = 1.0, base_p = 2.0;
  std::string path;           // sampled
  std::optional<double> horizon;

  Perturbation build(const NonlinearityModel& model, std::shared_ptr<DecayScale> scale,
                     double default_horizon) const;
};

struct NoiseSpec {
  std::string kind = "power-decay";
  double c = 1.0, gamma = 2.5;
  double base_c = 1.0, base_p = 2.0;
  std::string growth = "t";
  std::string path;
  std::optional<double> horizon;

  NoiseIntensity build(double default_horizon) const;
};

struct SweepSpec {
  std::vector<double> betas{1.5, 2.0, 3.0, 5.0};
  std::vector<double> gammas{0.6, 0.8, 1.0, 1.2, 1.4, 1.6, 1.8,
                             2.0, 2.2, 2.4, 2.6, 2.8, 3.0};
  double threshold_band = 0.05;  // cells this close to a threshold are skipped
  double h = 1.0;
};

struct ExperimentConfig {
  std::string kind;  // ode | ode-internal | sde | criteria | construct | sweep
  std::string out_dir = "out";
  ModelSpec model;
  std::optional<ForcingSpec> forcing;
  std::optional<NoiseSpec> noise;
  SweepSpec sweep;

  // run parameters
  std::vector<double> xi{1.0};
  double T = 1e4;
  double dt = 1e-2;
  int paths = 100;
  std::uint64_t seed = 1;
  std::vector<double> h{1.0};
  std::vector<double> epsilons{0.1, 1.0, 10.0};
  int threads = 1;
  int checkpoints_per_decade = 64;
  int dump_paths = 0;
  ClassifierTolerances tol;
  double criteria_t_max = 1e6;

  std::string raw;  // config file bytes, hashed into the manifest
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

// Executes one experiment, writing all artifact files under cfg.out_dir.
// Returns the CLI exit status: 0 ok, 3 runtime failure (config errors throw
// ConfigError before any file is written).
int run_experiment(const ExperimentConfig& cfg, std::ostream& log);

}  // namespace rvode
