#pragma once

#include <stdexcept>
#include <string>

namespace osctrace {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunOutcome {
  int exit_code = 0;  // 0 ok | 1 criterion failed | 2 config error | 3 computation failed
  std::string message;
};

// Batch driver: read a config file, run the requested pipeline, write the
// declared outputs atomically (CSV + report.json), return the outcome.
// Overrides: empty out_dir/mode, threads <= 0, seed < 0 mean "use the config";
// a non-empty mode must agree with the config when both are present.
RunOutcome run_experiment_file(const std::string& config_path, const std::string& out_dir = "",
                               int threads = 0, long long seed = -1,
                               const std::string& mode = "");

// Same on an in-memory JSON text (used by tests).
RunOutcome run_experiment_text(const std::string& config_json, const std::string& out_dir = "",
                               int threads = 0, long long seed = -1,
                               const std::string& mode = "");

}  // namespace osctrace
