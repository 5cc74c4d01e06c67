#include "leveralign/leveralign.h"

#include <cstring>
#include <filesystem>
#include <new>
#include <string>
#include <vector>

#include "leveralign/config.hpp"
#include "leveralign/error.hpp"
#include "leveralign/harness.hpp"

struct la_config {
  leveralign::ExperimentConfig value;
};

namespace {

thread_local std::string g_error;
thread_local std::string g_error_key;

la_status fail(la_status status, const std::string& what, const std::string& key = {}) {
  g_error = what;
  g_error_key = key;
  return status;
}

// Maps any exception escaping `fn` to a status code.
template <class Fn>
la_status guarded(Fn&& fn) {
  g_error.clear();
  g_error_key.clear();
  try {
    fn();
    return LA_OK;
  } catch (const leveralign::ConfigError& e) {
    return fail(LA_ERR_CONFIG, e.what(), e.key());
  } catch (const leveralign::DegenerateGeometryError& e) {
    return fail(LA_ERR_DEGENERATE, e.what());
  } catch (const leveralign::DomainError& e) {
    return fail(LA_ERR_INVALID_ARGUMENT, e.what());
  } catch (const leveralign::IoError& e) {
    return fail(LA_ERR_IO, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(LA_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(LA_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(LA_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(LA_ERR_INTERNAL, "unknown error");
  }
}

la_status null_arg(const char* name) { return fail(LA_ERR_INVALID_ARGUMENT, std::string(name) + " is NULL"); }

}  // namespace

extern "C" {

const char* la_status_string(la_status status) {
  switch (status) {
    case LA_OK: return "ok";
    case LA_ERR_INVALID_ARGUMENT: return "invalid argument";
    case LA_ERR_CONFIG: return "config error";
    case LA_ERR_DEGENERATE: return "degenerate geometry";
    case LA_ERR_IO: return "i/o error";
    case LA_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* la_last_error(void) { return g_error.c_str(); }
const char* la_last_error_key(void) { return g_error_key.c_str(); }

la_status la_config_default(la_config** out) {
  if (out == nullptr) return null_arg("out");
  *out = nullptr;
  return guarded([&] { *out = new la_config{}; });
}

la_status la_config_load(const char* path, la_config** out) {
  if (out == nullptr) return null_arg("out");
  *out = nullptr;
  if (path == nullptr) return null_arg("path");
  return guarded([&] {
    if (!std::filesystem::exists(path)) {
      throw leveralign::ConfigError(std::string("config file '") + path + "' does not exist");
    }
    *out = new la_config{leveralign::load_config(path)};
  });
}

la_status la_config_parse(const char* text, la_config** out) {
  if (out == nullptr) return null_arg("out");
  *out = nullptr;
  if (text == nullptr) return null_arg("text");
  return guarded([&] { *out = new la_config{leveralign::parse_config(text)}; });
}

void la_config_free(la_config* config) { delete config; }

la_status la_config_set(la_config* config, const char* key, const char* value) {
  if (config == nullptr) return null_arg("config");
  if (key == nullptr) return null_arg("key");
  if (value == nullptr) return null_arg("value");
  return guarded([&] {
    leveralign::ExperimentConfig updated = config->value;
    leveralign::set_config_value(updated, key, value);
    leveralign::validate(updated);
    config->value = updated;
  });
}

la_status la_config_dump(const la_config* config, char* buf, size_t size, size_t* needed) {
  if (config == nullptr) return null_arg("config");
  return guarded([&] {
    const std::string dump = leveralign::dump_config(config->value);
    if (needed != nullptr) *needed = dump.size() + 1;
    if (buf == nullptr) return;
    if (size < dump.size() + 1) throw leveralign::DomainError("buffer too small for the config dump");
    std::memcpy(buf, dump.c_str(), dump.size() + 1);
  });
}

la_status la_run_single(const la_config* config, uint64_t run_index) {
  if (config == nullptr) return null_arg("config");
  return guarded([&] { leveralign::command_run(config->value, run_index); });
}

la_status la_run_monte_carlo(const la_config* config) {
  if (config == nullptr) return null_arg("config");
  return guarded([&] { leveralign::command_monte_carlo(config->value); });
}

la_status la_report_remarks(const la_config* config) {
  if (config == nullptr) return null_arg("config");
  return guarded([&] { leveralign::command_remarks(config->value); });
}

la_status la_export_streams(const la_config* config, uint64_t run_index) {
  if (config == nullptr) return null_arg("config");
  return guarded([&] { leveralign::command_export_streams(config->value, run_index); });
}

la_status la_solve_attitude(const double* alpha, const double* beta, const double* weights, size_t n,
                            double c_out[9], double axis_out[3]) {
  if (alpha == nullptr) return null_arg("alpha");
  if (beta == nullptr) return null_arg("beta");
  if (c_out == nullptr) return null_arg("c_out");
  using namespace leveralign;
  std::vector<ObservationPair> pairs(n);
  for (size_t i = 0; i < n; ++i) {
    pairs[i].alpha = FrameVector<Frame::Nav0>(Vec3(alpha[3 * i], alpha[3 * i + 1], alpha[3 * i + 2]));
    pairs[i].beta = FrameVector<Frame::Body0>(Vec3(beta[3 * i], beta[3 * i + 1], beta[3 * i + 2]));
    pairs[i].weight = weights != nullptr ? weights[i] : 1.0;
  }
  return guarded([&] {
    try {
      const Mat3 c = solve_attitude(pairs).c_b_n0.matrix();
      for (int r = 0; r < 3; ++r) {
        for (int k = 0; k < 3; ++k) c_out[3 * r + k] = c(r, k);
      }
    } catch (const DegenerateGeometryError& e) {
      if (axis_out != nullptr) {
        for (int k = 0; k < 3; ++k) axis_out[k] = e.axis()(k);
      }
      throw;
    }
  });
}

}  // extern "C"
