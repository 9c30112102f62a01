// SPDX-License-Identifier: Apache-2.0
#include "weylab/weylab.h"

#include <cstring>
#include <sstream>
#include <string>

#include "core/config.hpp"
#include "core/error.hpp"
#include "core/experiments.hpp"

struct weylab_config {
  weylab::ExperimentConfig value;
};

struct weylab_result {
  weylab::ExperimentOutput output;
  std::string verdict_json;
  std::string status;
};

namespace {

thread_local std::string last_error;

weylab_status record(weylab_status s, const std::string& message) {
  last_error = message;
  return s;
}

template <class F>
weylab_status guarded(F&& body) {
  try {
    last_error.clear();
    body();
    return WEYLAB_OK;
  } catch (const weylab::Error& e) {
    return record(static_cast<weylab_status>(static_cast<int>(e.code())), e.what());
  } catch (const std::bad_alloc&) {
    return record(WEYLAB_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return record(WEYLAB_E_INTERNAL, e.what());
  }
}

std::string text_or_empty(const char* s) { return s ? std::string(s) : std::string(); }

}  // namespace

extern "C" {

const char* weylab_version(void) { return "0.3.0"; }

const char* weylab_status_name(weylab_status status) {
  if (status == WEYLAB_OK) return "ok";
  if (status == WEYLAB_E_INTERNAL) return "internal";
  if (status >= WEYLAB_E_INVALID_ARGUMENT && status <= WEYLAB_E_UNKNOWN_EXPERIMENT)
    return weylab::error_code_name(static_cast<weylab::ErrorCode>(status));
  return "unknown";
}

const char* weylab_last_error(void) { return last_error.c_str(); }

size_t weylab_experiment_count(void) { return weylab::experiment_names().size(); }

const char* weylab_experiment_name(size_t index) {
  static const std::vector<std::string> names = weylab::experiment_names();
  return index < names.size() ? names[index].c_str() : nullptr;
}

weylab_status weylab_config_parse(const char* text, const char* experiment, weylab_config** out) {
  if (!out) return record(WEYLAB_E_INVALID_ARGUMENT, "null output handle");
  *out = nullptr;
  if (!text) return record(WEYLAB_E_INVALID_ARGUMENT, "null configuration text");
  return guarded([&] {
    auto cfg = weylab::parse_config(text, text_or_empty(experiment));
    *out = new weylab_config{std::move(cfg)};
  });
}

weylab_status weylab_config_default(const char* experiment, weylab_config** out) {
  if (!out) return record(WEYLAB_E_INVALID_ARGUMENT, "null output handle");
  *out = nullptr;
  return guarded([&] {
    *out = new weylab_config{weylab::default_config(text_or_empty(experiment))};
  });
}

weylab_status weylab_config_set(weylab_config* config, const char* key, const char* value) {
  if (!config || !key) return record(WEYLAB_E_INVALID_ARGUMENT, "null config or key");
  return guarded([&] {
    const std::string k = key, v = text_or_empty(value);
    std::istringstream in(weylab::emit_config(config->value));
    std::string line, text;
    while (std::getline(in, line))
      if (line.rfind(k + " = ", 0) != 0) text += line + '\n';
    if (!v.empty()) text += k + " = " + v + '\n';
    config->value = weylab::parse_config(text);
  });
}

weylab_status weylab_config_emit(const weylab_config* config, char* buffer, size_t capacity,
                                 size_t* needed) {
  if (!config) return record(WEYLAB_E_INVALID_ARGUMENT, "null config");
  return guarded([&] {
    const std::string text = weylab::emit_config(config->value);
    if (needed) *needed = text.size() + 1;
    if (buffer && capacity > text.size()) std::memcpy(buffer, text.c_str(), text.size() + 1);
    else if (buffer && capacity > 0)
      throw weylab::Error(weylab::ErrorCode::invalid_argument, "buffer too small");
  });
}

void weylab_config_free(weylab_config* config) { delete config; }

weylab_status weylab_run(const weylab_config* config, const char* experiment,
                         weylab_result** out) {
  if (!config || !out) return record(WEYLAB_E_INVALID_ARGUMENT, "null config or output handle");
  *out = nullptr;
  return guarded([&] {
    auto output = weylab::run_experiment(text_or_empty(experiment), config->value);
    auto* r = new weylab_result{std::move(output), {}, {}};
    r->verdict_json = r->output.verdict_text();
    r->status = weylab::status_name(r->output.verdict.overall());
    *out = r;
  });
}

int weylab_result_exit_status(const weylab_result* result) {
  return result ? weylab::exit_status(result->output.verdict) : 1;
}

const char* weylab_result_status(const weylab_result* result) {
  return result ? result->status.c_str() : nullptr;
}

const char* weylab_result_verdict_json(const weylab_result* result) {
  return result ? result->verdict_json.c_str() : nullptr;
}

size_t weylab_result_file_count(const weylab_result* result) {
  return result ? result->output.files.size() : 0;
}

const char* weylab_result_file_name(const weylab_result* result, size_t index) {
  if (!result || index >= result->output.files.size()) return nullptr;
  return result->output.files[index].name.c_str();
}

const char* weylab_result_file_content(const weylab_result* result, size_t index) {
  if (!result || index >= result->output.files.size()) return nullptr;
  return result->output.files[index].content.c_str();
}

weylab_status weylab_result_write(const weylab_result* result, const char* directory) {
  if (!result || !directory) return record(WEYLAB_E_INVALID_ARGUMENT, "null result or directory");
  return guarded([&] { weylab::write_outputs(result->output, directory); });
}

void weylab_result_free(weylab_result* result) { delete result; }

}  // extern "C"
