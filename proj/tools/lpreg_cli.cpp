#include <string>

#include <CLI11.hpp>

#include "lpreg/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Latent-position graph sampling, node regression, and recovery experiments"};
  app.require_subcommand(1);

  lpreg::cli::CliOptions opt;
  std::string seed_text, out_text;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "JSON config file (defaults apply if omitted)");
    sub->add_option("--seed", seed_text, "master seed: u64 or \"entropy\"");
    sub->add_option("--out", out_text, "output directory");
    sub->add_flag("--plot", opt.plot, "also write an SVG plot where supported");
    sub->add_option("--q", opt.q, "adjacency re-threshold level in (0,1)");
    sub->add_option("--rho0", opt.rho0, "spectral bulk margin, > 0");
    sub->add_flag("--linear-grid", opt.linear_grid, "linearly spaced sweep grid");
    sub->add_flag("--oracle-distances", opt.oracle_distances,
                  "predict: run ENW tags on true distances (debug reduction)");
    return sub;
  };

  add_common(app.add_subcommand("sample", "sample positions, edges, labels to CSV"));
  add_common(app.add_subcommand("predict", "one prediction at the held-out node"));
  add_common(app.add_subcommand("recover", "recover positions on one sampled graph"));
  add_common(app.add_subcommand("sweep", "bias-variance sweep over the length-scale grid"));
  add_common(app.add_subcommand("perturbed-nw", "in-sample NW under position perturbations"));
  add_common(app.add_subcommand("recovery-curve", "recovery error vs length-scale"));

  CLI11_PARSE(app, argc, argv);

  if (!seed_text.empty()) opt.seed = seed_text;
  if (!out_text.empty()) opt.out = out_text;
  return lpreg::cli::dispatch(app.get_subcommands().front()->get_name(), opt);
}
