#include <cstdio>
#include <exception>
#include <numeric>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "marketsim/harness.hpp"

namespace {

std::vector<double> parse_mu_list(const std::string& text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    std::string item = text.substr(pos, comma - pos);
    if (item.empty()) throw marketsim::ConfigError("--mu", "empty entry in list");
    std::size_t used = 0;
    double mu = 0.0;
    try {
      mu = std::stod(item, &used);
    } catch (const std::exception&) {
      throw marketsim::ConfigError("--mu", "not a number: " + item);
    }
    if (used != item.size()) throw marketsim::ConfigError("--mu", "not a number: " + item);
    if (!(mu > 0)) throw marketsim::ConfigError("--mu", "must be > 0: " + item);
    out.push_back(mu);
    pos = comma + 1;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deterministic simulator of market-based CPU allocation"};
  app.require_subcommand(1);

  bool quiet = false;
  app.add_flag("--quiet", quiet, "suppress progress output");

  std::string config_path;
  std::string out_dir;
  std::string mu_list;
  int n_seeds = 0;

  CLI::App* cmd_run = app.add_subcommand("run", "run the experiment described by a config file");
  cmd_run->fallthrough();
  cmd_run->add_option("--config", config_path, "JSON experiment config")->required();
  cmd_run->add_option("--out", out_dir, "output directory (default: config's output, else ./out)");

  CLI::App* cmd_sweep =
      app.add_subcommand("sweep", "run a config with the mu sweep or seed list overridden");
  cmd_sweep->fallthrough();
  cmd_sweep->add_option("--config", config_path, "JSON experiment config")->required();
  cmd_sweep->add_option("--out", out_dir, "output directory");
  cmd_sweep->add_option("--mu", mu_list, "comma-separated interarrival means, overrides sweep");
  cmd_sweep->add_option("--seeds", n_seeds, "run seeds 1..N, overrides the seed list");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    marketsim::ExperimentSpec spec = marketsim::load_experiment(config_path);
    if (cmd_sweep->parsed()) {
      if (!mu_list.empty()) spec.sweep = parse_mu_list(mu_list);
      if (cmd_sweep->count("--seeds")) {
        if (n_seeds < 1) throw marketsim::ConfigError("--seeds", "must be >= 1");
        spec.seeds.resize(static_cast<std::size_t>(n_seeds));
        std::iota(spec.seeds.begin(), spec.seeds.end(), 1);
      }
    }
    std::string dir = !out_dir.empty() ? out_dir : (!spec.output.empty() ? spec.output : "out");
    marketsim::run_experiment_to_dir(spec, dir, 0, quiet);
    if (!quiet) std::fprintf(stderr, "wrote %s/runs.csv and %s/agg.csv\n", dir.c_str(), dir.c_str());
    return 0;
  } catch (const marketsim::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
