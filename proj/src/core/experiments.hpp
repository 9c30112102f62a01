// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "core/config.hpp"
#include "core/harness.hpp"

namespace weylab {

struct OutputFile {
  std::string name;
  std::string content;
};

struct ExperimentOutput {
  VerdictDocument verdict;
  std::vector<OutputFile> files;  // CSV tables; verdict.json is rendered separately
  std::string verdict_text() const;
};

// Runs a registered experiment; throws Error(unknown_experiment) or Error(config).
ExperimentOutput run_experiment(const std::string& name, const ExperimentConfig& config);

// Writes every file plus verdict.json into dir, creating it if needed.
void write_outputs(const ExperimentOutput& output, const std::string& dir);

}  // namespace weylab
