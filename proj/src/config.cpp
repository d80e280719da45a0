#include "capwave/config.hpp"

#include <set>

#include "capwave/models.hpp"

namespace capwave::config {

using nlohmann::json;

namespace {

// Strict field reader: rejects unknown keys so config typos fail loudly.
class Fields {
 public:
  explicit Fields(const json& j, std::string scope) : j_(j), scope_(std::move(scope)) {
    if (!j.is_object()) throw config_error(scope_ + ": expected a JSON object");
  }

  template <typename T>
  void get(const char* key, T& into) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      into = j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw config_error(scope_ + "." + key + ": wrong type");
    }
  }

  json sub(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? j_.at(key) : json::object();
  }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!seen_.contains(item.key())) {
        throw config_error(scope_ + ": unknown key '" + item.key() + "'");
      }
    }
  }

 private:
  const json& j_;
  std::string scope_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw config_error(what);
}

}  // namespace

flow1d::VorticityModel build_model(const ModelSpec& spec) {
  if (spec.preset == "zero") return models::zero();
  if (spec.preset == "linear-gamma") return models::linear_gamma(spec.slope);
  if (spec.preset == "linear-swirl") return models::linear_swirl(spec.omega);
  if (spec.preset == "linear-both") return models::linear_both(spec.slope, spec.omega);
  throw config_error("model.preset: unknown preset '" + spec.preset + "'");
}

ModelSpec model_from_json(const json& j) {
  ModelSpec spec;
  if (j.is_null() || (j.is_object() && j.empty())) return spec;
  Fields f(j, "model");
  f.get("preset", spec.preset);
  f.get("slope", spec.slope);
  f.get("omega", spec.omega);
  f.finish();
  build_model(spec);  // validates the preset name and gamma(0)=F(0)=0
  return spec;
}

json model_to_json(const ModelSpec& spec) {
  return json{{"preset", spec.preset}, {"slope", spec.slope}, {"omega", spec.omega}};
}

UnduloidTableConfig UnduloidTableConfig::from_json(const json& j) {
  UnduloidTableConfig c;
  Fields f(j, "unduloid-table");
  f.get("b0", c.b0);
  f.get("k0", c.k0);
  f.get("n", c.n);
  f.finish();
  require(c.b0 > 0.0, "unduloid-table.b0 must be positive");
  require(c.k0 >= 0.0 && c.k0 < 1.0, "unduloid-table.k0 must lie in [0,1)");
  require(c.n >= 2, "unduloid-table.n must be at least 2");
  return c;
}

json UnduloidTableConfig::to_json() const {
  return json{{"b0", b0}, {"k0", k0}, {"n", n}};
}

CurvatureSweepConfig CurvatureSweepConfig::from_json(const json& j) {
  CurvatureSweepConfig c;
  Fields f(j, "curvature-sweep");
  f.get("b", c.b);
  f.get("k_min", c.k_min);
  f.get("k_max", c.k_max);
  f.get("n_k", c.n_k);
  f.get("fd_step", c.fd_step);
  f.finish();
  require(c.b > 0.0, "curvature-sweep.b must be positive");
  require(c.k_min > 0.0 && c.k_max < 1.0 && c.k_min <= c.k_max,
          "curvature-sweep requires 0 < k_min <= k_max < 1");
  require(c.n_k >= 1, "curvature-sweep.n_k must be at least 1");
  require(c.fd_step > 0.0, "curvature-sweep.fd_step must be positive");
  return c;
}

json CurvatureSweepConfig::to_json() const {
  return json{{"b", b}, {"k_min", k_min}, {"k_max", k_max}, {"n_k", n_k}, {"fd_step", fd_step}};
}

KernelCertConfig KernelCertConfig::from_json(const json& j) {
  KernelCertConfig c;
  Fields f(j, "kernel-cert");
  f.get("b0", c.b0);
  f.get("k0", c.k0);
  f.get("grids", c.grids);
  f.finish();
  require(c.b0 > 0.0, "kernel-cert.b0 must be positive");
  require(c.k0 >= 0.0 && c.k0 < 1.0, "kernel-cert.k0 must lie in [0,1)");
  require(c.grids.size() >= 2, "kernel-cert.grids needs at least two sizes");
  for (std::size_t i = 0; i < c.grids.size(); ++i) {
    require(c.grids[i] >= 16, "kernel-cert.grids entries must be >= 16");
    if (i > 0) require(c.grids[i] > c.grids[i - 1], "kernel-cert.grids must increase");
  }
  return c;
}

json KernelCertConfig::to_json() const {
  return json{{"b0", b0}, {"k0", k0}, {"grids", grids}};
}

EigCheckConfig EigCheckConfig::from_json(const json& j) {
  EigCheckConfig c;
  Fields f(j, "eig-check");
  f.get("b0", c.b0);
  f.get("k0", c.k0);
  f.get("gamma_prime_0", c.gamma_prime_0);
  f.get("F_prime_0", c.F_prime_0);
  f.get("n_s", c.n_s);
  f.get("n_z", c.n_z);
  f.finish();
  require(c.b0 > 0.0, "eig-check.b0 must be positive");
  require(c.k0 >= 0.0 && c.k0 < 1.0, "eig-check.k0 must lie in [0,1)");
  require(c.n_s >= 16 && c.n_z >= 16, "eig-check grid sizes must be >= 16");
  return c;
}

json EigCheckConfig::to_json() const {
  return json{{"b0", b0},
              {"k0", k0},
              {"gamma_prime_0", gamma_prime_0},
              {"F_prime_0", F_prime_0},
              {"n_s", n_s},
              {"n_z", n_z}};
}

ContinueConfig ContinueConfig::from_json(const json& j) {
  ContinueConfig c;
  Fields f(j, "continue");
  f.get("b0", c.b0);
  f.get("k0", c.k0);
  f.get("sigma", c.sigma);
  f.get("alpha", c.alpha);
  f.get("n_z", c.n_z);
  f.get("n_s", c.n_s);
  c.model = model_from_json(f.sub("model"));
  f.get("dlambda", c.dlambda);
  f.get("max_lambda", c.max_lambda);
  f.get("max_eta_norm", c.max_eta_norm);
  f.get("min_eta_floor", c.min_eta_floor);
  f.get("max_vorticity_norm", c.max_vorticity_norm);
  f.get("max_steps", c.max_steps);
  f.get("newton_tol", c.newton_tol);
  f.get("newton_max_iter", c.newton_max_iter);
  f.finish();
  require(c.b0 > 0.0, "continue.b0 must be positive");
  require(c.k0 > 0.0 && c.k0 < 1.0, "continue.k0 must lie in (0,1)");
  require(c.sigma > 0.0, "continue.sigma must be positive");
  require(c.alpha > 0.0 && c.alpha < 1.0, "continue.alpha must lie in (0,1)");
  require(c.n_z >= 16 && c.n_s >= 16, "continue grid sizes must be >= 16");
  require(c.dlambda != 0.0, "continue.dlambda must be nonzero");
  require(c.max_lambda > 0.0, "continue.max_lambda must be positive");
  require(c.newton_tol > 0.0, "continue.newton_tol must be positive");
  require(c.max_steps >= 1 && c.newton_max_iter >= 1, "continue iteration limits must be >= 1");
  return c;
}

json ContinueConfig::to_json() const {
  return json{{"b0", b0},
              {"k0", k0},
              {"sigma", sigma},
              {"alpha", alpha},
              {"n_z", n_z},
              {"n_s", n_s},
              {"model", model_to_json(model)},
              {"dlambda", dlambda},
              {"max_lambda", max_lambda},
              {"max_eta_norm", max_eta_norm},
              {"min_eta_floor", resolved_floor()},
              {"max_vorticity_norm", max_vorticity_norm},
              {"max_steps", max_steps},
              {"newton_tol", newton_tol},
              {"newton_max_iter", newton_max_iter}};
}

VerifyBranchConfig VerifyBranchConfig::from_json(const json& j) {
  VerifyBranchConfig c;
  Fields f(j, "verify-branch");
  f.get("branch_file", c.branch_file);
  f.get("tol", c.tol);
  f.finish();
  return c;
}

json VerifyBranchConfig::to_json() const {
  return json{{"branch_file", branch_file}, {"tol", tol}};
}

}  // namespace capwave::config
