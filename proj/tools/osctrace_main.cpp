#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "osctrace/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"osctrace: perturbed-oscillator trace experiments"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  int threads = 0;
  long long seed = -1;

  const char* modes[] = {"spectrum", "trace", "predict", "compare", "equiv", "crossmodel"};
  const char* blurbs[] = {
      "assemble and export the spectrum of H0 + B",
      "windowed Fourier transform of the Schroedinger trace near t = 2 pi k",
      "closed-form singularity predictor for a symbol",
      "full pipeline against both trace theorems (auto-calibrated)",
      "non-standard distribution series against its transform law",
      "Hermite blocks against Toeplitz compressions"};
  for (int i = 0; i < 6; ++i) {
    auto* sub = app.add_subcommand(modes[i], blurbs[i]);
    sub->add_option("--config", config_path, "experiment config (JSON)")->required();
    sub->add_option("--out", out_dir, "output directory (overrides config)");
    sub->add_option("--threads", threads, "worker threads");
    sub->add_option("--seed", seed, "seed for the critical-point multistart");
  }

  CLI11_PARSE(app, argc, argv);
  std::string mode = app.get_subcommands().front()->get_name();

  osctrace::RunOutcome outcome =
      osctrace::run_experiment_file(config_path, out_dir, threads, seed, mode);
  if (outcome.exit_code == 0) {
    std::printf("ok\n");
  } else {
    std::fprintf(stderr, "%s\n", outcome.message.c_str());
  }
  return outcome.exit_code;
}
