#pragma once

#include <cstdint>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "genlab/lab.hpp"
#include "genlab/ledger.hpp"

namespace genlab {

// Config problem at a JSON field path such as "experiments[2].generators[1]".
class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string path, const std::string& message)
      : std::runtime_error(path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

enum ExitCode : int { kExitOk = 0, kExitValidation = 2, kExitBudgetPartial = 3, kExitSuiteFailure = 4 };

// Command-line overrides applied on top of the config file.
struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> profile;
  std::optional<std::uint64_t> budget_nodes;
  std::optional<std::uint64_t> trials;
};

// Kinds accepted in the experiment list.
const std::vector<std::string>& experiment_kinds();

// Fills defaults, applies overrides and validates. The result is the canonical form hashed into the manifest.
nlohmann::json effective_config(const nlohmann::json& raw, const RunOverrides& overrides = {});

// Ledger built from the "profile" and "ledger" blocks of an effective experiment config.
ConstantLedger build_ledger(const Lab& lab, const nlohmann::json& experiment);

std::string sha256_hex(std::string_view data);

struct OutputFile {
  std::string name;      // relative to the output directory
  std::string contents;
};

struct ExperimentResult {
  std::string name, kind;
  std::vector<OutputFile> files;
  bool partial = false;
  bool suite_failed = false;
  std::vector<std::string> summary;  // human-readable table rows
};

// Runs one experiment from an effective config; workers only change internal parallelism.
ExperimentResult run_experiment(const nlohmann::json& experiment, unsigned workers);

struct RunResult {
  int exit_code = kExitOk;
  nlohmann::json manifest;
  std::vector<ExperimentResult> experiments;
};

// Runs every experiment, writes the files and manifest.json into out_dir when it is nonempty.
RunResult run_config(const nlohmann::json& effective, unsigned workers, const std::filesystem::path& out_dir);

}  // namespace genlab
