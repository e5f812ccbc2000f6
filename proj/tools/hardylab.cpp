#include "hardy/cli.hpp"
#include "hardy/errors.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

const char* kFooter = R"(Domains:
  disk[:r]  square  rectangle:w,h  ellipse:a,b  star:beta,k  peanut[:beta]
  cassini:a,c  polygon:FILE
Fields (psi):
  translation:cx,cy  dilation[:cx,cy]  rotation[:cx,cy]
  affine:a11,a12,a21,a22[:b1,b2]  bump:cx,cy:width:dx,dy[:amplitude[:cutoff|auto]]
Stability checks: minimizer lipschitz usc volume toperator
Config file: key = value lines under [run] [domain] [mesh] [solver]
  [perturbation] [sweep]; keys are the option names. Flags win.
Outputs in --out: <command>.json, <command>.meta.json (timestamps, threads),
  and <command>.csv with columns
    family:    t,H,min_det,n_vertices
    minimizer: t,pullback_gap,extension_gap,H,existence_flag
    sweeps:    eps,distortion,delta_rp,sym_diff,profile_l1,H_base,H_pert,gap,ratio,above_floor
Exit status: 0 ok, 2 invalid input, 3 solver failure, 4 not applicable.)";

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hardy constant lab: solve, alpha, derivative, family, stability, geometry"};
  app.footer(kFooter);
  app.set_help_flag("--help", "print this help and exit");
  std::string command, config_path, out_dir = ".";
  int threads = 0;
  app.add_option("command", command, "solve | alpha | derivative | family | stability | geometry");
  app.add_option("--config", config_path, "configuration file");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--threads", threads, "worker threads, 0 = hardware concurrency");
  hardy::Settings flags;
  std::map<std::string, CLI::Option*> options;
  for (const auto& [key, section] : hardy::config_keys()) {
    if (key == "command") continue;
    options[key] = app.add_option("--" + key, flags[key], "[" + section + "]");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << hardy::dump_json(hardy::error_record(command, hardy::ErrorKind::parameter, e.what()), 0);
    return hardy::exit_validation;
  }

  hardy::RunConfig config;
  try {
    hardy::Settings settings;
    if (!config_path.empty()) settings = hardy::read_config_file(config_path);
    for (const auto& [key, opt] : options)
      if (opt->count() > 0) settings[key] = flags[key];
    if (!command.empty()) settings["command"] = command;
    config = hardy::resolve_config(settings);
  } catch (const hardy::Error& e) {
    std::cerr << hardy::dump_json(hardy::error_record(command, e.kind(), e.what()), 0);
    return hardy::exit_validation;
  }
  config.out_dir = out_dir;
  config.threads = threads;
  return hardy::run(config, std::cout, std::cerr);
}
