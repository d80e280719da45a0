#include "capwave/branch_io.hpp"

#include <fstream>

#include "capwave/errors.hpp"

namespace capwave::branch_io {

using nlohmann::json;

namespace {

json state_to_json(const continuation::FlowState& s, const continuation::StateDiagnostics& d) {
  json j;
  j["lambda"] = s.lambda;
  j["eta"] = std::vector<double>(s.eta.values.data(), s.eta.values.data() + s.eta.values.size());
  json phi = json::array();
  for (int i = 0; i < s.phi.values.rows(); ++i) {
    json row = json::array();
    for (int c = 0; c < s.phi.values.cols(); ++c) row.push_back(s.phi.values(i, c));
    phi.push_back(std::move(row));
  }
  j["phi"] = std::move(phi);
  j["m"] = s.m;
  j["mean_eta"] = s.mean_eta;
  j["diagnostics"] = {{"residual", d.residual_inf},
                      {"min_eta", d.min_eta},
                      {"eta_norm", d.eta_norm},
                      {"vorticity_norm", d.vorticity_norm},
                      {"newton_iterations", d.newton_iterations},
                      {"loop_back_suspected", d.loop_back_suspected}};
  return j;
}

}  // namespace

void write_branch(const std::filesystem::path& path, const BranchHeader& header,
                  const continuation::Branch& branch) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_branch: cannot open " + path.string());

  json h;
  h["format"] = "capwave-branch";
  h["version"] = 1;
  h["b0"] = header.b0;
  h["k0"] = header.k0;
  h["n_z"] = header.n_z;
  h["n_s"] = header.n_s;
  h["sigma"] = header.sigma;
  h["Q"] = header.Q;
  h["alpha"] = header.alpha;
  h["newton_tol"] = header.newton_tol;
  h["dlambda"] = header.dlambda;
  h["model"] = header.model;
  out << h.dump() << "\n";

  for (std::size_t i = 0; i < branch.states.size(); ++i) {
    out << state_to_json(branch.states[i], branch.diagnostics[i]).dump() << "\n";
  }
  out << json{{"termination", continuation::to_string(branch.termination)}}.dump() << "\n";
  if (!out) throw std::runtime_error("write_branch: write failed for " + path.string());
}

LoadedBranch read_branch(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_branch: cannot open " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("read_branch: empty file");
  const json h = json::parse(line);
  if (h.value("format", "") != "capwave-branch") {
    throw std::runtime_error("read_branch: not a branch file: " + path.string());
  }

  LoadedBranch out;
  out.header.b0 = h.at("b0").get<double>();
  out.header.k0 = h.at("k0").get<double>();
  out.header.n_z = h.at("n_z").get<int>();
  out.header.n_s = h.at("n_s").get<int>();
  out.header.sigma = h.at("sigma").get<double>();
  out.header.Q = h.at("Q").get<double>();
  out.header.alpha = h.at("alpha").get<double>();
  out.header.newton_tol = h.at("newton_tol").get<double>();
  out.header.dlambda = h.at("dlambda").get<double>();
  out.header.model = h.value("model", json::object());

  const PeriodicEvenGrid zgrid(out.header.b0, out.header.n_z);
  const pde::MeridianGrid grid(out.header.n_s, zgrid);

  bool have_termination = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    if (j.contains("termination")) {
      out.branch.termination =
          continuation::termination_from_string(j.at("termination").get<std::string>());
      have_termination = true;
      continue;
    }
    continuation::FlowState s;
    s.lambda = j.at("lambda").get<double>();
    const auto eta = j.at("eta").get<std::vector<double>>();
    if (static_cast<int>(eta.size()) != out.header.n_z) {
      throw std::runtime_error("read_branch: eta sample count does not match header");
    }
    s.eta = GridFunction{zgrid, Eigen::Map<const Eigen::VectorXd>(eta.data(), eta.size())};
    Eigen::MatrixXd phi(out.header.n_s, out.header.n_z);
    const json& pj = j.at("phi");
    if (static_cast<int>(pj.size()) != out.header.n_s) {
      throw std::runtime_error("read_branch: phi row count does not match header");
    }
    for (int i = 0; i < out.header.n_s; ++i)
      for (int c = 0; c < out.header.n_z; ++c) phi(i, c) = pj.at(i).at(c).get<double>();
    s.phi = pde::MeridianFunction{grid, std::move(phi)};
    s.sigma = out.header.sigma;
    s.Q = out.header.Q;
    s.m = j.at("m").get<double>();
    s.mean_eta = j.at("mean_eta").get<double>();

    continuation::StateDiagnostics d;
    const json& dj = j.at("diagnostics");
    d.residual_inf = dj.at("residual").get<double>();
    d.min_eta = dj.at("min_eta").get<double>();
    d.eta_norm = dj.at("eta_norm").get<double>();
    d.vorticity_norm = dj.at("vorticity_norm").get<double>();
    d.newton_iterations = dj.at("newton_iterations").get<int>();
    d.loop_back_suspected = dj.at("loop_back_suspected").get<bool>();

    out.branch.states.push_back(std::move(s));
    out.branch.diagnostics.push_back(d);
  }
  if (!have_termination) {
    throw std::runtime_error("read_branch: missing termination line (truncated file?)");
  }
  return out;
}

}  // namespace capwave::branch_io
