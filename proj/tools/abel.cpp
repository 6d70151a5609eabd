#include <CLI11.hpp>

#include <iostream>
#include <utility>

#include "abel/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Closed solutions of Abel equations x' = A(t) x^3 + B(t) x^2"};
  app.require_subcommand(1);

  std::string config;
  std::string out = ".";
  int jobs = 0;
  const std::pair<const char*, const char*> commands[] = {
      {"analyze", "Zero structure, criteria, closed solutions and Hopf coefficients of one family"},
      {"sweep", "Closed-solution atlas along a one-parameter grid"},
      {"curves", "Sampled displacement, phi, Lambda and alpha/beta curves"},
      {"trig-infinity", "Behaviour at infinity of a trigonometric family"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config, "JSON configuration file")->required();
    sub->add_option("--out", out, "Output directory")->capture_default_str();
    sub->add_option("--jobs", jobs, "Worker threads for sweeps (0: all cores)")->check(CLI::NonNegativeNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  return abel::cli::dispatch(app.get_subcommands().front()->get_name(), config, out, jobs, std::cerr);
}
