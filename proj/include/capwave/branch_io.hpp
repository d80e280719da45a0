#ifndef CAPWAVE_BRANCH_IO_HPP
#define CAPWAVE_BRANCH_IO_HPP

#include <filesystem>
#include <string>

#include <json.hpp>

#include "capwave/continuation.hpp"

namespace capwave::branch_io {

// JSON-lines branch file: one header line with the grid metadata, one line
// per converged state (raw sample arrays, bit-exact on reload), and a final
// termination line.
struct BranchHeader {
  double b0 = 1.0;
  double k0 = 0.5;
  int n_z = 0;
  int n_s = 0;
  double sigma = 1.0;
  double Q = 0.0;
  double alpha = 0.5;
  double newton_tol = 1e-9;
  double dlambda = 0.0;
  nlohmann::json model;  // ModelSpec echo, parsed by the config layer
};

struct LoadedBranch {
  BranchHeader header;
  continuation::Branch branch;
};

void write_branch(const std::filesystem::path& path, const BranchHeader& header,
                  const continuation::Branch& branch);

LoadedBranch read_branch(const std::filesystem::path& path);

}  // namespace capwave::branch_io

#endif  // CAPWAVE_BRANCH_IO_HPP
