#ifndef CAPWAVE_CONFIG_HPP
#define CAPWAVE_CONFIG_HPP

#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "capwave/flow1d.hpp"

namespace capwave::config {

// Invalid or ill-typed run configuration (CLI exit code 2).
class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Named model presets; all satisfy gamma(0) = F(0) = 0 with bounded gamma'
// and (FF')'.
struct ModelSpec {
  std::string preset = "zero";  // zero | linear-gamma | linear-swirl | linear-both
  double slope = 0.0;           // gamma'(0) for the linear-gamma presets
  double omega = 0.0;           // swirl slope for the linear-swirl presets
};

flow1d::VorticityModel build_model(const ModelSpec& spec);
ModelSpec model_from_json(const nlohmann::json& j);
nlohmann::json model_to_json(const ModelSpec& spec);

struct UnduloidTableConfig {
  double b0 = 1.0;
  double k0 = 0.5;
  int n = 257;  // rows over one period

  static UnduloidTableConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct CurvatureSweepConfig {
  double b = 1.0;
  double k_min = 0.01;
  double k_max = 0.99;
  int n_k = 99;
  double fd_step = 1e-5;

  static CurvatureSweepConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct KernelCertConfig {
  double b0 = 1.0;
  double k0 = 0.5;
  std::vector<int> grids = {129, 257, 513};

  static KernelCertConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct EigCheckConfig {
  double b0 = 1.0;
  double k0 = 0.5;
  double gamma_prime_0 = 0.0;
  double F_prime_0 = 0.0;
  int n_s = 17;
  int n_z = 17;

  static EigCheckConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct ContinueConfig {
  double b0 = 1.0;
  double k0 = 0.5;
  double sigma = 1.0;
  double alpha = 0.5;
  int n_z = 33;
  int n_s = 17;
  ModelSpec model;
  double dlambda = 0.0125;
  double max_lambda = 0.05;
  double max_eta_norm = 50.0;
  double min_eta_floor = -1.0;  // < 0: resolved to 1e-3 * b0
  double max_vorticity_norm = 1e6;
  int max_steps = 500;
  double newton_tol = 1e-9;
  int newton_max_iter = 25;

  double resolved_floor() const { return min_eta_floor < 0.0 ? 1e-3 * b0 : min_eta_floor; }
  static ContinueConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct VerifyBranchConfig {
  std::string branch_file;
  double tol = -1.0;  // < 0: use the branch header's newton_tol

  static VerifyBranchConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

}  // namespace capwave::config

#endif  // CAPWAVE_CONFIG_HPP
