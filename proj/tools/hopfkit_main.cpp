#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "hopfkit/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"hopfkit: locate and control Hopf bifurcations of parameterized dynamical systems"};
  app.require_subcommand(1);

  auto* runcmd = app.add_subcommand("run", "execute a configured task");
  std::string config_path, out_dir;
  bool verbose = false;
  runcmd->add_option("config", config_path, "path to the run configuration")->required();
  runcmd->add_option("--out", out_dir, "output directory (default: config value or $HOPFKIT_OUT)");
  runcmd->add_flag("--verbose", verbose, "print progress to stderr");

  CLI11_PARSE(app, argc, argv);

  std::ifstream in(config_path);
  if (!in) {
    std::cerr << "error: cannot open config file: " << config_path << "\n";
    return 2;
  }
  std::stringstream buf;
  buf << in.rdbuf();

  hopfkit::RunConfig cfg;
  try {
    cfg = hopfkit::parse_config(buf.str());
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  if (out_dir.empty()) {
    if (const char* env = std::getenv("HOPFKIT_OUT"); env && cfg.out_dir == ".") out_dir = env;
  }
  return hopfkit::run(cfg, out_dir, verbose);
}
