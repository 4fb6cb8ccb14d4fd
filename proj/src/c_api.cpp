#include "metawave/metawave.h"

#include "core/error.hpp"
#include "core/runner.hpp"

#include <cstring>
#include <new>
#include <string>

struct mw_config {
  metawave::ScenarioConfig cfg;
};

struct mw_report {
  metawave::RunReport report;
  metawave::Timings timings;
};

namespace {

thread_local std::string last_error;

mw_status to_status(metawave::ErrorCode c) {
  using metawave::ErrorCode;
  switch (c) {
  case ErrorCode::parameter:
    return MW_ERR_PARAMETER;
  case ErrorCode::config:
    return MW_ERR_CONFIG;
  case ErrorCode::degenerate:
    return MW_ERR_DEGENERATE;
  case ErrorCode::geometry:
    return MW_ERR_GEOMETRY;
  case ErrorCode::resource:
    return MW_ERR_RESOURCE;
  case ErrorCode::solver:
    return MW_ERR_SOLVER;
  case ErrorCode::accuracy:
    return MW_ERR_ACCURACY;
  case ErrorCode::resonance:
    return MW_ERR_RESONANCE;
  case ErrorCode::consistency:
    return MW_ERR_CONSISTENCY;
  }
  return MW_ERR_INTERNAL;
}

template <class F> mw_status guard(F &&f) {
  try {
    last_error.clear();
    f();
    return MW_OK;
  } catch (const metawave::Error &e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc &) {
    last_error = "out of memory";
    return MW_ERR_RESOURCE;
  } catch (const std::exception &e) {
    last_error = e.what();
    return MW_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown exception";
    return MW_ERR_INTERNAL;
  }
}

char *dup_string(const std::string &s) {
  char *p = new char[s.size() + 1];
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

void need(const void *p, const char *what) {
  if (!p)
    metawave::fail(metawave::ErrorCode::parameter, std::string(what) + " is null");
}

metawave::GeometryId to_geometry(mw_geometry g) {
  switch (g) {
  case MW_SIGMA1:
    return metawave::GeometryId::sigma1;
  case MW_SIGMA2:
    return metawave::GeometryId::sigma2;
  case MW_SIGMA3:
    return metawave::GeometryId::sigma3;
  case MW_SIGMA4:
    return metawave::GeometryId::sigma4;
  }
  metawave::fail(metawave::ErrorCode::parameter, "unknown geometry id");
}

mw_coefficients to_c(const metawave::CoefficientSet &c) {
  return {{c.R.real(), c.R.imag()},
          {c.T.real(), c.T.imag()},
          {c.R_M.real(), c.R_M.imag()},
          {c.T_M.real(), c.T_M.imag()}};
}

} // namespace

extern "C" {

const char *mw_version(void) { return "0.1.0"; }

const char *mw_status_name(mw_status s) {
  switch (s) {
  case MW_OK:
    return "ok";
  case MW_ERR_PARAMETER:
    return "parameter";
  case MW_ERR_CONFIG:
    return "config";
  case MW_ERR_DEGENERATE:
    return "degenerate";
  case MW_ERR_GEOMETRY:
    return "geometry";
  case MW_ERR_RESOURCE:
    return "resource";
  case MW_ERR_SOLVER:
    return "solver";
  case MW_ERR_ACCURACY:
    return "accuracy";
  case MW_ERR_RESONANCE:
    return "resonance";
  case MW_ERR_CONSISTENCY:
    return "consistency";
  case MW_ERR_INTERNAL:
    return "internal";
  }
  return "unknown";
}

const char *mw_last_error(void) { return last_error.c_str(); }

int mw_exit_code(mw_status s) {
  if (s == MW_OK)
    return 0;
  return s == MW_ERR_CONFIG || s == MW_ERR_PARAMETER ? 1 : 2;
}

mw_status mw_closed_form_coeffs(mw_geometry g, double k0, double L, double alpha,
                                mw_complex gamma, mw_coefficients *out) {
  return guard([&] {
    need(out, "out");
    metawave::SlabParams p;
    p.omega = k0;
    p.L = L;
    p.alpha = alpha;
    p.gamma = {gamma.re, gamma.im};
    *out = to_c(metawave::closed_form_coeffs(to_geometry(g), p));
  });
}

mw_status mw_interface_oracle(mw_complex a_M, mw_complex k_M, double k0, double L,
                              mw_coefficients *out) {
  return guard([&] {
    need(out, "out");
    *out = to_c(metawave::interface_matching_oracle({a_M.re, a_M.im}, {k_M.re, k_M.im},
                                                    k0, L));
  });
}

mw_status mw_check_slab_oracle(int draws, uint64_t seed, double *max_deviation,
                               double *max_energy_defect) {
  return guard([&] {
    need(max_deviation, "max_deviation");
    need(max_energy_defect, "max_energy_defect");
    const metawave::OracleCheck c = metawave::check_slab_oracle(draws, seed);
    *max_deviation = c.max_deviation;
    *max_energy_defect = c.max_energy_defect;
  });
}

mw_status mw_config_load(const char *path, mw_config **out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = nullptr;
    *out = new mw_config{metawave::parse_config(path)};
  });
}

mw_status mw_config_parse(const char *json_text, mw_config **out) {
  return guard([&] {
    need(json_text, "json_text");
    need(out, "out");
    *out = nullptr;
    *out = new mw_config{metawave::parse_config_text(json_text)};
  });
}

mw_status mw_config_default(mw_config **out) {
  return guard([&] {
    need(out, "out");
    *out = new mw_config{metawave::parse_config_text("{}")};
  });
}

mw_status mw_config_set_out(mw_config *cfg, const char *dir) {
  return guard([&] {
    need(cfg, "cfg");
    need(dir, "dir");
    cfg->cfg.out = dir;
  });
}

mw_status mw_config_to_json(const mw_config *cfg, char **out) {
  return guard([&] {
    need(cfg, "cfg");
    need(out, "out");
    *out = dup_string(metawave::config_to_json(cfg->cfg).dump(2));
  });
}

mw_status mw_config_fingerprint(const mw_config *cfg, char **out) {
  return guard([&] {
    need(cfg, "cfg");
    need(out, "out");
    *out = dup_string(metawave::config_fingerprint(cfg->cfg));
  });
}

void mw_config_free(mw_config *cfg) { delete cfg; }

mw_status mw_run(const mw_config *cfg, const char *stage, int threads, int write_files,
                 mw_report **out) {
  return guard([&] {
    need(cfg, "cfg");
    need(stage, "stage");
    need(out, "out");
    *out = nullptr;
    if (threads < 1)
      metawave::fail(metawave::ErrorCode::parameter, "threads must be at least 1");
    const metawave::Stage st = metawave::parse_stage(stage);
    auto *r = new mw_report;
    metawave::RunOptions opts;
    opts.threads = threads;
    opts.write_files = write_files != 0;
    try {
      r->report = metawave::run_stage(cfg->cfg, st, opts, &r->timings);
    } catch (...) {
      delete r;
      throw;
    }
    *out = r;
  });
}

mw_status mw_report_status(const mw_report *r) {
  if (!r) {
    last_error = "report is null";
    return MW_ERR_PARAMETER;
  }
  if (r->report.failures.empty())
    return MW_OK;
  const metawave::Failure &f = r->report.failures.front();
  last_error = f.stage + ": " + f.message;
  return to_status(f.code);
}

mw_status mw_report_to_json(const mw_report *r, char **out) {
  return guard([&] {
    need(r, "report");
    need(out, "out");
    *out = dup_string(metawave::report_to_json(r->report).dump(2));
  });
}

mw_status mw_report_timings_json(const mw_report *r, char **out) {
  return guard([&] {
    need(r, "report");
    need(out, "out");
    nlohmann::json j = nlohmann::json::object();
    for (const auto &[k, v] : r->timings)
      j[k] = v;
    *out = dup_string(j.dump(2));
  });
}

void mw_report_free(mw_report *r) { delete r; }

void mw_string_free(char *s) { delete[] s; }

} // extern "C"
