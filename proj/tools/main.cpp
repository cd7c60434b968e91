#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "fracstar/commands.hpp"
#include "fracstar/config.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "Direct and inverse source solvers for time-fractional diffusion on a "
      "metric star graph"};

  std::string command;
  std::string config_path;
  app.add_option("command", command,
                 "one of: solve-direct, solve-inverse, check-k1, "
                 "verify-operators, convergence")
      ->required()
      ->check(CLI::IsMember({"solve-direct", "solve-inverse", "check-k1",
                             "verify-operators", "convergence"}));
  app.add_option("config", config_path, "configuration file (JSON)")
      ->required();

  std::string out_dir;
  double tol = 0.0;
  std::size_t max_iter = 0;
  std::string levels;
  std::uint64_t seed = 0;
  auto* out_opt = app.add_option("--out", out_dir, "output directory");
  auto* tol_opt =
      app.add_option("--tol", tol, "fixed-point stopping tolerance");
  auto* iter_opt =
      app.add_option("--max-iter", max_iter, "iteration budget");
  auto* levels_opt = app.add_option(
      "--levels", levels, "refinement ladder \"N0xM0,N1xM1,...\"");
  auto* seed_opt =
      app.add_option("--seed", seed, "seed for manufactured instances");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  fracstar::CommandOptions options;
  if (*out_opt) options.out_dir = out_dir;
  if (*tol_opt) options.tol = tol;
  if (*iter_opt) options.max_iter = max_iter;
  if (*levels_opt) options.levels = levels;
  if (*seed_opt) options.seed = seed;

  std::ifstream in(config_path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot read config file '" << config_path << "'\n";
    return 1;
  }
  std::ostringstream text;
  text << in.rdbuf();

  try {
    fracstar::Config cfg = fracstar::parse_config(text.str());
    return fracstar::run_command(command, std::move(cfg), options, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
