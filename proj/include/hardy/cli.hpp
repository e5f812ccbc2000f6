#pragma once

#include "hardy/cylinder.hpp"
#include "hardy/domain.hpp"
#include "hardy/errors.hpp"
#include "hardy/hardy_solver.hpp"
#include "hardy/perturbation.hpp"
#include "hardy/report.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace hardy {

struct RunConfig {
  std::string command;
  std::string domain = "peanut:0.55";
  int boundary_points = 1024;
  double p = 2.0;
  std::string psi;
  MeshParams mesh{};
  int levels = 1;
  SolverParams solver{};
  double H = 0.0;  // alpha command
  std::vector<double> t_grid{0.08, 0.04, 0.02, 0.01};
  std::vector<double> amplitudes{0.1, 0.05, 0.025, 0.0125};
  std::vector<double> fd_steps{1e-2, 1e-3, 1e-4};
  std::string check = "minimizer";
  double r = 3.0;
  double s = 0.3;
  std::string cylinder = "-0.3,0.3,0,0.9";
  double rho = 0.4;
  double M = 40.0;
  double delta = 0.0;  // 0 selects the default collar depth
  int trials = 3;
  std::string point;
  std::string other_domain;
  bool force = false;
  bool formula_only = false;
  std::uint64_t seed = 7;
  std::string out_dir = ".";
  int threads = 0;
};

/// Exit statuses of `run`.
enum ExitCode { exit_ok = 0, exit_validation = 2, exit_solver = 3, exit_inapplicable = 4 };

/// Maps an error kind to its exit status.
int exit_code_for(ErrorKind kind);

/// Key-value settings; keys are option names without dashes.
using Settings = std::map<std::string, std::string>;

/// Section of each configuration key ("run", "domain", "mesh", "solver",
/// "perturbation", "sweep").
const std::map<std::string, std::string>& config_keys();

/// Reads a config file of `key = value` lines grouped under [section] headers.
/// Throws parameter on unknown keys or keys under the wrong section.
Settings read_config(std::istream& in);
Settings read_config_file(const std::string& path);

/// Validated configuration from settings; throws parameter on bad values.
RunConfig resolve_config(const Settings& settings);

/// The configuration as written into every output (no paths or thread count).
Json config_json(const RunConfig& config);

Domain parse_domain(const std::string& spec, int boundary_points = 1024);

/// translation:cx,cy  dilation[:cx,cy]  rotation[:cx,cy]
/// affine:a11,a12,a21,a22[:b1,b2]  bump:cx,cy:w:dx,dy[:amplitude[:cutoff|auto]]
FieldPtr parse_field(const std::string& spec, const Domain& domain);

/// w0,w1,a,b[:ox,oy[:angle]]
Cylinder parse_cylinder(const std::string& spec);

std::vector<double> parse_list(const std::string& text);

struct RunOutcome {
  int status = exit_ok;
  Json result;
  /// One line per result.
  std::vector<std::string> summary;
};

/// Executes the command without touching the filesystem (except polygon
/// input files). Errors are thrown.
RunOutcome execute(const RunConfig& config);

/// Executes, writes <out>/<command>.json (and .csv where tabular), the
/// metadata file <out>/<command>.meta.json, prints summaries to `out` and
/// error records to `err`. Returns the exit status.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Error record written on failure.
Json error_record(const std::string& command, ErrorKind kind, const std::string& message);

}  // namespace hardy
