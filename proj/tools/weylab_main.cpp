// SPDX-License-Identifier: Apache-2.0
#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "weylab/weylab.h"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitConfig = 3;

struct ConfigDeleter {
  void operator()(weylab_config* c) const { weylab_config_free(c); }
};
struct ResultDeleter {
  void operator()(weylab_result* r) const { weylab_result_free(r); }
};

void print_registry(std::ostream& os) {
  os << "registered experiments:\n";
  for (std::size_t i = 0; i < weylab_experiment_count(); ++i)
    os << "  " << weylab_experiment_name(i) << '\n';
}

bool is_registered(const std::string& name) {
  for (std::size_t i = 0; i < weylab_experiment_count(); ++i)
    if (name == weylab_experiment_name(i)) return true;
  return false;
}

int report_error(weylab_status s) {
  std::cerr << "error (" << weylab_status_name(s) << "): " << weylab_last_error() << '\n';
  return s == WEYLAB_E_CONFIG || s == WEYLAB_E_IO ? kExitConfig : 1;
}

std::string format_h(double h) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", h);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semiclassical eigenvalue counting experiments"};
  std::string config_path, experiment, out_dir;
  std::optional<unsigned long long> seed;
  std::optional<double> h_min, h_max;
  std::optional<int> h_points;
  bool list = false;
  app.add_option("--config", config_path, "key = value configuration file")->check(CLI::ExistingFile);
  app.add_option("--experiment", experiment, "experiment name");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "override the configured seed");
  app.add_option("--h-min", h_min, "smallest h of a log-spaced grid");
  app.add_option("--h-max", h_max, "largest h of a log-spaced grid");
  app.add_option("--h-points", h_points, "number of h values");
  app.add_flag("--list", list, "list registered experiments");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitUsage;
  }

  if (list) {
    print_registry(std::cout);
    return 0;
  }
  if (experiment.empty()) {
    std::cerr << "--experiment is required\n";
    print_registry(std::cerr);
    return kExitUsage;
  }
  if (!is_registered(experiment)) {
    std::cerr << "unknown experiment '" << experiment << "'\n";
    print_registry(std::cerr);
    return kExitUsage;
  }

  weylab_config* raw_config = nullptr;
  weylab_status st;
  if (!config_path.empty()) {
    std::ifstream f(config_path);
    std::stringstream ss;
    ss << f.rdbuf();
    st = weylab_config_parse(ss.str().c_str(), experiment.c_str(), &raw_config);
  } else {
    st = weylab_config_default(experiment.c_str(), &raw_config);
  }
  if (st != WEYLAB_OK) return report_error(st);
  std::unique_ptr<weylab_config, ConfigDeleter> config(raw_config);

  auto set = [&](const char* key, const std::string& value) {
    const weylab_status s = weylab_config_set(config.get(), key, value.c_str());
    if (s != WEYLAB_OK) throw s;
  };
  try {
    if (seed) set("seed", std::to_string(*seed));
    if (h_min || h_max || h_points) {
      set("h_grid", "");
      if (h_max) set("h_max", format_h(*h_max));
      if (h_min) set("h_min", format_h(*h_min));
      if (h_points) set("h_points", std::to_string(*h_points));
    }
  } catch (weylab_status s) {
    return report_error(s);
  }

  if (out_dir.empty()) {
    std::size_t needed = 0;
    weylab_config_emit(config.get(), nullptr, 0, &needed);
    std::string text(needed, '\0');
    weylab_config_emit(config.get(), text.data(), text.size(), &needed);
    const auto pos = text.find("output_dir = ");
    out_dir = pos == std::string::npos
                  ? "weylab_out/" + experiment
                  : text.substr(pos + 13, text.find('\n', pos) - pos - 13);
  }

  weylab_result* raw_result = nullptr;
  st = weylab_run(config.get(), experiment.c_str(), &raw_result);
  if (st != WEYLAB_OK) return report_error(st);
  std::unique_ptr<weylab_result, ResultDeleter> result(raw_result);

  st = weylab_result_write(result.get(), out_dir.c_str());
  if (st != WEYLAB_OK) return report_error(st);

  const auto verdict = nlohmann::json::parse(weylab_result_verdict_json(result.get()));
  for (const auto& c : verdict["criteria"]) {
    std::cout << '[' << c["status"].get<std::string>() << "] " << c["id"].get<std::string>()
              << ": " << c["description"].get<std::string>();
    if (!c["witness_h"].is_null()) std::cout << " (witness h = " << c["witness_h"] << ')';
    std::cout << '\n';
  }
  if (verdict["tables"].contains("sweep"))
    for (const auto& f : verdict["tables"]["sweep"]["faults"])
      std::cerr << "fault at h = " << f["h"] << ": " << f["fault"].get<std::string>() << '\n';
  std::cout << weylab_result_status(result.get()) << ' ' << experiment << " -> " << out_dir
            << '\n';
  return weylab_result_exit_status(result.get());
}
