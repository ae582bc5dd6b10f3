#pragma once

#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "opfree/covmap.hpp"
#include "opfree/fock.hpp"
#include "opfree/report.hpp"

namespace opfree::cli {

// Covariance description as it appears in config files.
struct CovSpec {
  std::string kind;  // "diagonal-EB" | "kraus" | "table" | "block"
  int index_count = 1;
  std::vector<Matrix> kraus;                // (n·|I|)×n matrices
  std::vector<std::vector<Matrix>> table;   // dimB×dimB coordinate maps
  bool symmetrize = false;
  std::vector<CovSpec> parts;               // for kind "block"
};

struct RunConfig {
  std::vector<std::pair<int, int>> blocks;  // (size, multiplicity) per block of B
  std::vector<double> block_weights;
  std::map<std::string, Matrix> named_matrices;  // referenced from polynomial text
  CovSpec covariance;
  int depth = 3;
  std::uint64_t seed = 1;
  double suite_tolerance = 1e-9;
  Tolerances tol;
  std::map<std::string, int> degree_caps;
  std::vector<std::string> suites;  // empty: defaults for the model shape

  std::vector<std::vector<int>> freeness_families;
  std::vector<int> psi_word_block, psi_pair_block;
  std::vector<double> convolution_t{0.0, 1.0, 2.5};
  std::string kernel_poly;
  std::string out_path;
};

RunConfig load_config(const std::string& path);

// Owning bundle; the covariance and model point into the context.
struct BuiltModel {
  std::unique_ptr<matalg::AlgebraContext> ctx;
  std::unique_ptr<covmap::CovarianceMatrix> eta;
  std::unique_ptr<fock::FockModel> model;
};

BuiltModel build_model(const RunConfig& config);

struct SuiteInfo {
  std::string name;
  std::string identity;
};
const std::vector<SuiteInfo>& registered_suites();

// Runs the selected suites, writes the report (file when out_path set, and
// always to `console`), and returns the exit code: 0 all pass, 1 any FAIL.
int run_command(const RunConfig& config, std::ostream& console);

int describe_command(const RunConfig& config, std::ostream& console);

void list_suites(std::ostream& console);

}  // namespace opfree::cli
