// capwave: unduloid geometry tables, curvature and kernel certificates, and
// natural-parameter continuation of axisymmetric capillary waves.
//
// Exit codes: 0 success, 2 config error, 3 solver/certificate failure,
// 4 I/O error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "capwave/branch_io.hpp"
#include "capwave/config.hpp"
#include "capwave/continuation.hpp"
#include "capwave/errors.hpp"
#include "capwave/linops.hpp"
#include "capwave/pde.hpp"
#include "capwave/unduloid.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace capwave;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;
constexpr int kExitIo = 4;

struct CliContext {
  std::string config_path;
  std::string out_dir = ".";
  long seed = 0;
};

json load_config(const CliContext& ctx) {
  if (ctx.config_path.empty()) return json::object();
  std::ifstream in(ctx.config_path);
  if (!in) throw std::ios_base::failure("cannot open config file: " + ctx.config_path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw config::config_error(std::string("config parse error: ") + e.what());
  }
}

fs::path ensure_out_dir(const CliContext& ctx) {
  fs::path dir(ctx.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::ios_base::failure("cannot create output directory: " + dir.string());
  return dir;
}

// Reproducibility: every command writes its fully resolved configuration
// before any results.
void write_echo(const fs::path& dir, const std::string& command, const json& resolved,
                long seed) {
  json echo;
  echo["command"] = command;
  echo["seed"] = seed;
  echo["config"] = resolved;
  std::ofstream out(dir / (command + "_config.json"));
  if (!out) throw std::ios_base::failure("cannot write config echo");
  out << echo.dump(2) << "\n";
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

int cmd_unduloid_table(const CliContext& ctx) {
  const auto cfg = config::UnduloidTableConfig::from_json(load_config(ctx));
  const fs::path dir = ensure_out_dir(ctx);
  write_echo(dir, "unduloid-table", cfg.to_json(), ctx.seed);

  const unduloid::ShapeParams base{cfg.b0, cfg.k0};
  const double period = unduloid::period_shape(cfg.b0);
  const double kappa = unduloid::mean_curvature_shape(base);

  std::ofstream out(dir / "unduloid_table.csv");
  if (!out) throw std::ios_base::failure("cannot write unduloid_table.csv");
  out << "# capwave unduloid-table\n";
  out << "# b0 = " << fmt(cfg.b0) << ", k0 = " << fmt(cfg.k0) << "\n";
  out << "# period = " << fmt(period) << "\n";
  out << "# mean_curvature = " << fmt(kappa) << "\n";
  out << "z,eta,eta_z,eta_zz,kappa_of_eta\n";
  for (int i = 0; i < cfg.n; ++i) {
    const double z = period * i / (cfg.n - 1.0);
    const auto s = unduloid::profile_eval(base, z);
    out << fmt(z) << ',' << fmt(s.eta) << ',' << fmt(s.eta_z) << ',' << fmt(s.eta_zz) << ','
        << fmt(unduloid::graph_curvature(s)) << "\n";
  }
  return kExitOk;
}

int cmd_curvature_sweep(const CliContext& ctx) {
  const auto cfg = config::CurvatureSweepConfig::from_json(load_config(ctx));
  const fs::path dir = ensure_out_dir(ctx);
  write_echo(dir, "curvature-sweep", cfg.to_json(), ctx.seed);

  std::ofstream out(dir / "curvature_sweep.csv");
  if (!out) throw std::ios_base::failure("cannot write curvature_sweep.csv");
  out << "# capwave curvature-sweep\n";
  out << "# b = " << fmt(cfg.b) << ", fd_step = " << fmt(cfg.fd_step) << "\n";
  out << "k,kappa,dkappa_dk_closed,dkappa_dk_fd\n";
  for (int i = 0; i < cfg.n_k; ++i) {
    const double k =
        cfg.n_k == 1 ? cfg.k_min : cfg.k_min + (cfg.k_max - cfg.k_min) * i / (cfg.n_k - 1.0);
    const double kappa = unduloid::mean_curvature_shape({cfg.b, k});
    const double closed = unduloid::dkappa_dk({cfg.b, k});
    const double h = std::min({cfg.fd_step, 0.5 * k, 0.5 * (1.0 - k)});
    const double fd = (unduloid::mean_curvature_shape({cfg.b, k + h}) -
                       unduloid::mean_curvature_shape({cfg.b, k - h})) /
                      (2.0 * h);
    out << fmt(k) << ',' << fmt(kappa) << ',' << fmt(closed) << ',' << fmt(fd) << "\n";
  }
  return kExitOk;
}

json grid_report_to_json(const linops::KernelGridReport& g, bool degenerate) {
  json j;
  j["n"] = g.n;
  j["h"] = g.h;
  j["sigma_min"] = g.sigma_min;
  if (!degenerate) {
    j["res_etaz"] = g.res_etaz;
    j["res_v"] = g.res_v;
    j["witness_err"] = g.witness_err;
  }
  return j;
}

int cmd_kernel_cert(const CliContext& ctx) {
  const auto cfg = config::KernelCertConfig::from_json(load_config(ctx));
  const fs::path dir = ensure_out_dir(ctx);
  write_echo(dir, "kernel-cert", cfg.to_json(), ctx.seed);

  const auto cert = linops::kernel_certificate({cfg.b0, cfg.k0}, cfg.grids);

  json j;
  j["b0"] = cfg.b0;
  j["k0"] = cfg.k0;
  j["degenerate"] = cert.degenerate;
  j["grids"] = json::array();
  for (const auto& g : cert.grids) j["grids"].push_back(grid_report_to_json(g, cert.degenerate));
  j["orders_etaz"] = cert.orders_etaz;
  j["orders_v"] = cert.orders_v;
  j["fd_floor"] = cert.fd_floor;
  j["sigma_drift"] = cert.sigma_drift;
  j["sigma_extrapolated"] = cert.sigma_extrapolated;
  j["min_order_required"] = linops::kernel_min_order;
  j["passed"] = cert.passed;
  if (!cert.passed) j["failure"] = cert.failure;

  std::ofstream out(dir / "kernel_certificate.json");
  if (!out) throw std::ios_base::failure("cannot write kernel_certificate.json");
  out << j.dump(2) << "\n";

  if (!cert.passed) {
    std::cerr << "kernel certificate failed: " << cert.failure << "\n";
    return kExitSolver;
  }
  return kExitOk;
}

int cmd_eig_check(const CliContext& ctx) {
  const auto cfg = config::EigCheckConfig::from_json(load_config(ctx));
  const fs::path dir = ensure_out_dir(ctx);
  write_echo(dir, "eig-check", cfg.to_json(), ctx.seed);

  const pde::MeridianGrid grid(cfg.n_s, PeriodicEvenGrid(cfg.b0, cfg.n_z));
  const auto res =
      pde::eigenvalue_check({cfg.b0, cfg.k0}, cfg.gamma_prime_0, cfg.F_prime_0, grid);

  json j;
  j["b0"] = cfg.b0;
  j["k0"] = cfg.k0;
  j["gamma_prime_0"] = cfg.gamma_prime_0;
  j["F_prime_0"] = cfg.F_prime_0;
  j["n_s"] = res.n_s;
  j["n_z"] = res.n_z;
  j["eigenvalue_re"] = res.eigenvalue.real();
  j["eigenvalue_im"] = res.eigenvalue.imag();
  j["magnitude"] = res.magnitude;

  std::ofstream out(dir / "eig_check.json");
  if (!out) throw std::ios_base::failure("cannot write eig_check.json");
  out << j.dump(2) << "\n";
  return kExitOk;
}

void write_branch_and_summary(std::ofstream& summary, const fs::path& dir,
                              const std::string& name, const config::ContinueConfig& cfg,
                              const continuation::Branch& branch, double q, double dlambda) {
  branch_io::BranchHeader header;
  header.b0 = cfg.b0;
  header.k0 = cfg.k0;
  header.n_z = cfg.n_z;
  header.n_s = cfg.n_s;
  header.sigma = cfg.sigma;
  header.Q = q;
  header.alpha = cfg.alpha;
  header.newton_tol = cfg.newton_tol;
  header.dlambda = dlambda;
  header.model = config::model_to_json(cfg.model);
  branch_io::write_branch(dir / (name + ".jsonl"), header, branch);

  for (std::size_t i = 0; i < branch.states.size(); ++i) {
    const auto& s = branch.states[i];
    const auto& d = branch.diagnostics[i];
    summary << name << ',' << fmt(s.lambda) << ',' << fmt(d.residual_inf) << ','
            << fmt(d.min_eta) << ',' << fmt(d.eta_norm) << ',' << fmt(d.vorticity_norm) << ','
            << d.newton_iterations << ',' << (d.loop_back_suspected ? 1 : 0) << "\n";
  }
  summary << "# " << name << " termination = " << continuation::to_string(branch.termination)
          << "\n";
}

int cmd_continue(const CliContext& ctx) {
  const auto cfg = config::ContinueConfig::from_json(load_config(ctx));
  const fs::path dir = ensure_out_dir(ctx);
  write_echo(dir, "continue", cfg.to_json(), ctx.seed);

  const auto model = config::build_model(cfg.model);
  continuation::Limits limits;
  limits.max_abs_lambda = cfg.max_lambda;
  limits.max_eta_norm = cfg.max_eta_norm;
  limits.min_eta_floor = cfg.resolved_floor();
  limits.max_vorticity_norm = cfg.max_vorticity_norm;
  limits.max_steps = cfg.max_steps;
  limits.newton_tol = cfg.newton_tol;
  limits.newton_max_iter = cfg.newton_max_iter;
  limits.alpha = cfg.alpha;

  const auto start_raw =
      continuation::static_state({cfg.b0, cfg.k0}, cfg.sigma, cfg.n_z, cfg.n_s);
  const auto start =
      continuation::newton_correct(start_raw, model, cfg.newton_tol, cfg.newton_max_iter);

  const auto plus = continuation::continue_branch(start, model, std::abs(cfg.dlambda), limits);
  const auto minus = continuation::continue_branch(start, model, -std::abs(cfg.dlambda), limits);

  std::ofstream summary(dir / "continue_summary.csv");
  if (!summary) throw std::ios_base::failure("cannot write continue_summary.csv");
  summary << "# capwave continue\n";
  summary << "# Q = " << fmt(start.Q) << "\n";
  summary << "branch,lambda,residual,min_eta,eta_norm,vorticity_norm,newton_iterations,"
             "loop_back_suspected\n";
  write_branch_and_summary(summary, dir, "branch_pos", cfg, plus, start.Q,
                           std::abs(cfg.dlambda));
  write_branch_and_summary(summary, dir, "branch_neg", cfg, minus, start.Q,
                           -std::abs(cfg.dlambda));
  return kExitOk;
}

int cmd_verify_branch(const CliContext& ctx, const std::string& positional_file) {
  auto cfg = config::VerifyBranchConfig::from_json(load_config(ctx));
  if (!positional_file.empty()) cfg.branch_file = positional_file;
  if (cfg.branch_file.empty()) {
    throw config::config_error("verify-branch: no branch file given (config or argument)");
  }
  const fs::path dir = ensure_out_dir(ctx);
  write_echo(dir, "verify-branch", cfg.to_json(), ctx.seed);

  const auto loaded = branch_io::read_branch(cfg.branch_file);
  const auto model = config::build_model(config::model_from_json(loaded.header.model));
  const double tol = cfg.tol > 0.0 ? cfg.tol : loaded.header.newton_tol;

  json states = json::array();
  bool all_ok = true;
  for (std::size_t i = 0; i < loaded.branch.states.size(); ++i) {
    const auto& s = loaded.branch.states[i];
    const double res = continuation::residual_F(s, model).inf_norm();
    const bool ok = res <= tol;
    all_ok = all_ok && ok;
    states.push_back(json{{"lambda", s.lambda},
                          {"residual", res},
                          {"stored_residual", loaded.branch.diagnostics[i].residual_inf},
                          {"ok", ok}});
    std::cout << (ok ? "[ ok ] " : "[FAIL] ") << "lambda = " << s.lambda
              << "  residual = " << res << "\n";
  }

  json j;
  j["branch_file"] = cfg.branch_file;
  j["tol"] = tol;
  j["termination"] = continuation::to_string(loaded.branch.termination);
  j["states"] = states;
  j["passed"] = all_ok;
  std::ofstream out(dir / "verify_report.json");
  if (!out) throw std::ios_base::failure("cannot write verify_report.json");
  out << j.dump(2) << "\n";

  return all_ok ? kExitOk : kExitSolver;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"unduloid statics, kernel certificates, and capillary-wave continuation"};
  app.require_subcommand(1);
  app.fallthrough();

  CliContext ctx;
  app.add_option("--config", ctx.config_path, "JSON run configuration");
  app.add_option("--out", ctx.out_dir, "output directory (default: .)");
  app.add_option("--seed", ctx.seed, "seed for random-perturbation tests; echoed");

  auto* table = app.add_subcommand("unduloid-table", "sample one unduloid period to CSV");
  auto* sweep = app.add_subcommand("curvature-sweep", "kappa and d kappa/dk over a k-grid");
  auto* cert = app.add_subcommand("kernel-cert", "kernel certificate for the operator T");
  auto* eig = app.add_subcommand("eig-check", "zero-eigenvalue assumption diagnostic");
  auto* cont = app.add_subcommand("continue", "trace both branches from a static unduloid");
  auto* verify = app.add_subcommand("verify-branch", "recompute residuals of a stored branch");
  std::string branch_file;
  verify->add_option("file", branch_file, "branch JSONL file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (table->parsed()) return cmd_unduloid_table(ctx);
    if (sweep->parsed()) return cmd_curvature_sweep(ctx);
    if (cert->parsed()) return cmd_kernel_cert(ctx);
    if (eig->parsed()) return cmd_eig_check(ctx);
    if (cont->parsed()) return cmd_continue(ctx);
    if (verify->parsed()) return cmd_verify_branch(ctx, branch_file);
  } catch (const config::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const convergence_error& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kExitSolver;
  } catch (const solver_error& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kExitSolver;
  } catch (const inadmissible_state& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kExitSolver;
  } catch (const certificate_error& e) {
    std::cerr << "certificate failure: " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitOk;
}
