#include "rtmix/rtmix.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <memory>
#include <new>
#include <sstream>
#include <string>

#include "rtmix/crossval.hpp"
#include "rtmix/data.hpp"
#include "rtmix/diagnostics.hpp"
#include "rtmix/error.hpp"
#include "rtmix/io.hpp"
#include "rtmix/model.hpp"
#include "rtmix/random.hpp"
#include "rtmix/sampler.hpp"
#include "rtmix/simulate.hpp"

struct rtmix_dataset {
  rtmix::Dataset value;
};

struct rtmix_folds {
  rtmix::FoldPlan value;
};

struct rtmix_fit {
  rtmix::ModelKind kind;
  rtmix::PosteriorDraws draws;
  rtmix::Diagnostics diagnostics;
};

struct rtmix_elpd {
  rtmix::ElpdReport value;
};

struct rtmix_comparison {
  rtmix::ElpdComparison value;
  std::string winner;
};

struct rtmix_recovery {
  rtmix::RecoveryReport value;
};

struct rtmix_ppc {
  rtmix::PpcSummary value;
};

namespace {

thread_local std::string last_error;

rtmix_status fail(rtmix_status status, const std::string& message) {
  last_error = message;
  return status;
}

rtmix_status status_of(rtmix::ErrorKind kind) {
  using rtmix::ErrorKind;
  switch (kind) {
    case ErrorKind::Io: return RTMIX_ERR_IO;
    case ErrorKind::Format: return RTMIX_ERR_FORMAT;
    case ErrorKind::Row: return RTMIX_ERR_ROW;
    case ErrorKind::Domain: return RTMIX_ERR_DOMAIN;
    case ErrorKind::Numerical: return RTMIX_ERR_NUMERICAL;
    case ErrorKind::Alignment: return RTMIX_ERR_ALIGNMENT;
    case ErrorKind::InfeasibleSplit: return RTMIX_ERR_INFEASIBLE_SPLIT;
    case ErrorKind::Initialization: return RTMIX_ERR_INIT;
    case ErrorKind::Fold: return RTMIX_ERR_FOLD;
  }
  return RTMIX_ERR_INTERNAL;
}

// Runs body, translating exceptions into status codes.
template <typename F>
rtmix_status guarded(F&& body) {
  try {
    body();
    return RTMIX_OK;
  } catch (const rtmix::Error& e) {
    return fail(status_of(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(RTMIX_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(RTMIX_ERR_INTERNAL, e.what());
  }
}

rtmix_status null_argument(const char* what) {
  return fail(RTMIX_ERR_ARGUMENT, std::string(what) + " is null");
}

rtmix_status copy_text(const std::string& text, char* buf, size_t cap,
                       size_t* len) {
  if (len) *len = text.size();
  if (buf && cap > 0) {
    const size_t n = text.size() < cap - 1 ? text.size() : cap - 1;
    std::memcpy(buf, text.data(), n);
    buf[n] = '\0';
  }
  if (!buf || cap <= text.size())
    return fail(RTMIX_ERR_BUFFER, "buffer holds " + std::to_string(cap) +
                                      " bytes, need " +
                                      std::to_string(text.size() + 1));
  return RTMIX_OK;
}

template <typename Write>
void write_file(const char* path, Write&& write) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw rtmix::IoError(std::string("cannot write ") + path);
  write(out);
  if (!out) throw rtmix::IoError(std::string("write failed for ") + path);
}

rtmix::ModelKind kind_of(rtmix_model model) {
  return model == RTMIX_MODEL_LINEAR ? rtmix::ModelKind::Linear
                                     : rtmix::ModelKind::Mixture;
}

bool valid_model(rtmix_model model) {
  return model == RTMIX_MODEL_LINEAR || model == RTMIX_MODEL_MIXTURE;
}

rtmix::SamplerConfig to_config(const rtmix_sampler_config& c) {
  rtmix::SamplerConfig config;
  config.n_chains = c.n_chains;
  config.n_warmup = c.n_warmup;
  config.n_samples = c.n_samples;
  config.seed = c.seed;
  config.target_accept = c.target_accept;
  config.max_leapfrog = c.max_leapfrog;
  config.path_length = c.path_length;
  return config;
}

}  // namespace

extern "C" {

const char* rtmix_version(void) { return "1.0.0"; }

const char* rtmix_last_error(void) { return last_error.c_str(); }

const char* rtmix_status_name(rtmix_status status) {
  switch (status) {
    case RTMIX_OK: return "ok";
    case RTMIX_ERR_ARGUMENT: return "argument error";
    case RTMIX_ERR_IO: return "io error";
    case RTMIX_ERR_FORMAT: return "format error";
    case RTMIX_ERR_ROW: return "row error";
    case RTMIX_ERR_DOMAIN: return "domain error";
    case RTMIX_ERR_INFEASIBLE_SPLIT: return "infeasible split";
    case RTMIX_ERR_ALIGNMENT: return "alignment error";
    case RTMIX_ERR_NUMERICAL: return "numerical error";
    case RTMIX_ERR_INIT: return "initialization error";
    case RTMIX_ERR_FOLD: return "fold error";
    case RTMIX_ERR_BUFFER: return "buffer too small";
    case RTMIX_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

uint64_t rtmix_derive_seed(uint64_t master, rtmix_seed_stream stream,
                           uint64_t index) {
  return rtmix::derive_seed(master, static_cast<rtmix::SeedStream>(stream), index);
}

rtmix_status rtmix_model_parse(const char* name, rtmix_model* out) {
  if (!name || !out) return null_argument("argument");
  const auto kind = rtmix::parse_model(name);
  if (!kind)
    return fail(RTMIX_ERR_ARGUMENT,
                std::string("unknown model `") + name + "` (linear|mixture)");
  *out = *kind == rtmix::ModelKind::Linear ? RTMIX_MODEL_LINEAR
                                           : RTMIX_MODEL_MIXTURE;
  return RTMIX_OK;
}

const char* rtmix_model_name(rtmix_model model) {
  return model == RTMIX_MODEL_LINEAR ? "linear" : "mixture";
}

rtmix_status rtmix_dataset_load_csv(const char* path, rtmix_dataset** out) {
  if (!path || !out) return null_argument("argument");
  return guarded([&] {
    *out = new rtmix_dataset{rtmix::load_csv(path)};
  });
}

rtmix_status rtmix_dataset_save_csv(const rtmix_dataset* dataset,
                                    const char* path) {
  if (!dataset || !path) return null_argument("argument");
  return guarded([&] {
    write_file(path, [&](std::ostream& o) { rtmix::write_csv(dataset->value, o); });
  });
}

size_t rtmix_dataset_size(const rtmix_dataset* d) { return d ? d->value.size() : 0; }
size_t rtmix_dataset_participants(const rtmix_dataset* d) {
  return d ? d->value.n_participants() : 0;
}
size_t rtmix_dataset_items(const rtmix_dataset* d) {
  return d ? d->value.n_items() : 0;
}
void rtmix_dataset_free(rtmix_dataset* d) { delete d; }

rtmix_status rtmix_folds_make(const rtmix_dataset* dataset, size_t k,
                              uint64_t seed, rtmix_folds** out) {
  if (!dataset || !out) return null_argument("argument");
  return guarded([&] {
    *out = new rtmix_folds{rtmix::make_folds(dataset->value, k, seed)};
  });
}

rtmix_status rtmix_folds_save_csv(const rtmix_folds* folds, const char* path) {
  if (!folds || !path) return null_argument("argument");
  return guarded([&] {
    write_file(path, [&](std::ostream& o) { rtmix::write_csv(folds->value, o); });
  });
}

size_t rtmix_folds_k(const rtmix_folds* folds) { return folds ? folds->value.k : 0; }
void rtmix_folds_free(rtmix_folds* folds) { delete folds; }

void rtmix_sampler_config_init(rtmix_sampler_config* c) {
  if (!c) return;
  const rtmix::SamplerConfig d;
  c->n_chains = d.n_chains;
  c->n_warmup = d.n_warmup;
  c->n_samples = d.n_samples;
  c->seed = d.seed;
  c->target_accept = d.target_accept;
  c->max_leapfrog = d.max_leapfrog;
  c->path_length = d.path_length;
}

rtmix_status rtmix_fit_run(const rtmix_dataset* dataset, rtmix_model model,
                           const rtmix_sampler_config* config, rtmix_fit** out) {
  if (!dataset || !config || !out) return null_argument("argument");
  if (!valid_model(model)) return fail(RTMIX_ERR_ARGUMENT, "unknown model");
  return guarded([&] {
    auto fit = std::make_unique<rtmix_fit>();
    fit->kind = kind_of(model);
    fit->draws = rtmix::sample(fit->kind, dataset->value, to_config(*config));
    fit->diagnostics = rtmix::diagnose(fit->draws);
    *out = fit.release();
  });
}

rtmix_model rtmix_fit_model(const rtmix_fit* fit) {
  return fit && fit->kind == rtmix::ModelKind::Mixture ? RTMIX_MODEL_MIXTURE
                                                       : RTMIX_MODEL_LINEAR;
}

size_t rtmix_fit_coordinates(const rtmix_fit* fit) {
  return fit ? fit->draws.n_coordinates() : 0;
}

size_t rtmix_fit_draws(const rtmix_fit* fit) {
  return fit ? fit->draws.total_draws() : 0;
}

const char* rtmix_fit_coordinate_name(const rtmix_fit* fit, size_t coord) {
  if (!fit || coord >= fit->draws.n_coordinates()) return nullptr;
  return fit->draws.names()[coord].c_str();
}

double rtmix_fit_value(const rtmix_fit* fit, size_t draw, size_t coord) {
  if (!fit || draw >= fit->draws.total_draws() ||
      coord >= fit->draws.n_coordinates())
    return std::numeric_limits<double>::quiet_NaN();
  return fit->draws.row(draw)[coord];
}

double rtmix_fit_max_rhat(const rtmix_fit* fit) {
  return fit ? fit->diagnostics.max_rhat()
             : std::numeric_limits<double>::quiet_NaN();
}

size_t rtmix_fit_divergences(const rtmix_fit* fit) {
  size_t total = 0;
  if (fit)
    for (size_t d : fit->diagnostics.divergences) total += d;
  return total;
}

rtmix_status rtmix_fit_save_draws_csv(const rtmix_fit* fit, const char* path) {
  if (!fit || !path) return null_argument("argument");
  return guarded([&] {
    write_file(path, [&](std::ostream& o) { rtmix::write_draws_csv(fit->draws, o); });
  });
}

rtmix_status rtmix_fit_save_diagnostics_json(const rtmix_fit* fit,
                                             const char* path) {
  if (!fit || !path) return null_argument("argument");
  return guarded([&] {
    write_file(path, [&](std::ostream& o) {
      o << rtmix::diagnostics_json(fit->diagnostics);
    });
  });
}

rtmix_status rtmix_fit_save_names_json(const rtmix_fit* fit, const char* path) {
  if (!fit || !path) return null_argument("argument");
  return guarded([&] {
    write_file(path, [&](std::ostream& o) {
      o << rtmix::names_json(fit->draws.names());
    });
  });
}

rtmix_status rtmix_fit_save_summary_csv(const rtmix_fit* fit, const char* path) {
  if (!fit || !path) return null_argument("argument");
  return guarded([&] {
    write_file(path, [&](std::ostream& o) {
      rtmix::write_summary_csv(rtmix::summarize(fit->draws, fit->kind), o);
    });
  });
}

rtmix_status rtmix_fit_summary_table(const rtmix_fit* fit, char* buf, size_t cap,
                                     size_t* len) {
  if (!fit) return null_argument("fit");
  std::string text;
  const rtmix_status s = guarded([&] {
    text = rtmix::summary_table(rtmix::summarize(fit->draws, fit->kind));
  });
  return s == RTMIX_OK ? copy_text(text, buf, cap, len) : s;
}

rtmix_status rtmix_fit_warnings(const rtmix_fit* fit, char* buf, size_t cap,
                                size_t* len) {
  if (!fit) return null_argument("fit");
  std::string text;
  for (const auto& w : fit->diagnostics.warnings) text += w + "\n";
  return copy_text(text, buf, cap, len);
}

void rtmix_fit_free(rtmix_fit* fit) { delete fit; }

rtmix_status rtmix_kfold_run(const rtmix_dataset* dataset, rtmix_model model,
                             const rtmix_folds* folds,
                             const rtmix_sampler_config* config,
                             rtmix_elpd** out) {
  if (!dataset || !folds || !config || !out) return null_argument("argument");
  if (!valid_model(model)) return fail(RTMIX_ERR_ARGUMENT, "unknown model");
  return guarded([&] {
    *out = new rtmix_elpd{rtmix::run_kfold(kind_of(model), dataset->value,
                                           folds->value, to_config(*config))};
  });
}

double rtmix_elpd_total(const rtmix_elpd* e) {
  return e ? e->value.total : std::numeric_limits<double>::quiet_NaN();
}
double rtmix_elpd_se(const rtmix_elpd* e) {
  return e ? e->value.se_total : std::numeric_limits<double>::quiet_NaN();
}
size_t rtmix_elpd_size(const rtmix_elpd* e) { return e ? e->value.pointwise.size() : 0; }
size_t rtmix_elpd_warning_count(const rtmix_elpd* e) {
  return e ? e->value.warnings.size() : 0;
}

rtmix_status rtmix_elpd_save_json(const rtmix_elpd* e, const char* path) {
  if (!e || !path) return null_argument("argument");
  return guarded([&] {
    write_file(path, [&](std::ostream& o) { o << rtmix::report_json(e->value); });
  });
}

void rtmix_elpd_free(rtmix_elpd* e) { delete e; }

rtmix_status rtmix_compare(const rtmix_elpd* a, const rtmix_elpd* b,
                           rtmix_comparison** out) {
  if (!a || !b || !out) return null_argument("argument");
  return guarded([&] {
    auto cmp = std::make_unique<rtmix_comparison>();
    cmp->value = rtmix::compare(a->value, b->value);
    cmp->winner = cmp->value.winner();
    *out = cmp.release();
  });
}

double rtmix_comparison_diff(const rtmix_comparison* c) {
  return c ? c->value.diff : std::numeric_limits<double>::quiet_NaN();
}
double rtmix_comparison_se(const rtmix_comparison* c) {
  return c ? c->value.se_diff : std::numeric_limits<double>::quiet_NaN();
}
const char* rtmix_comparison_winner(const rtmix_comparison* c) {
  return c ? c->winner.c_str() : nullptr;
}

rtmix_status rtmix_comparison_save_json(const rtmix_comparison* c,
                                        const char* path) {
  if (!c || !path) return null_argument("argument");
  return guarded([&] {
    write_file(path, [&](std::ostream& o) { o << rtmix::comparison_json(c->value); });
  });
}

rtmix_status rtmix_comparison_table(const rtmix_elpd* a, const rtmix_elpd* b,
                                    const rtmix_comparison* c, char* buf,
                                    size_t cap, size_t* len) {
  if (!a || !b || !c) return null_argument("argument");
  return copy_text(rtmix::elpd_table(a->value, b->value, c->value), buf, cap, len);
}

void rtmix_comparison_free(rtmix_comparison* c) { delete c; }

void rtmix_design_init(rtmix_design* design) {
  if (!design) return;
  const rtmix::DesignSpec d;
  design->n_participants = d.n_participants;
  design->n_items = d.n_items;
  design->seed = d.seed;
}

void rtmix_linear_truth_init(rtmix_linear_truth* t) {
  if (!t) return;
  const rtmix::LinearTruth d;
  *t = {d.beta0, d.beta1, d.sigma_e, d.sigma_u, d.sigma_w};
}

void rtmix_mixture_truth_init(rtmix_mixture_truth* t) {
  if (!t) return;
  const rtmix::MixtureTruth d;
  *t = {d.beta, d.delta, d.p_sr, d.p_or, d.sigma_e, d.sigma_ep, d.sigma_u,
        d.sigma_w};
}

rtmix_status rtmix_simulate_linear(const rtmix_linear_truth* truth,
                                   const rtmix_design* design,
                                   rtmix_dataset** out) {
  if (!truth || !design || !out) return null_argument("argument");
  return guarded([&] {
    const rtmix::LinearTruth t{truth->beta0, truth->beta1, truth->sigma_e,
                               truth->sigma_u, truth->sigma_w};
    const rtmix::DesignSpec d{design->n_participants, design->n_items,
                              design->seed};
    *out = new rtmix_dataset{rtmix::gen_linear(t, d).dataset};
  });
}

rtmix_status rtmix_simulate_mixture(const rtmix_mixture_truth* truth,
                                    const rtmix_design* design,
                                    rtmix_dataset** out) {
  if (!truth || !design || !out) return null_argument("argument");
  return guarded([&] {
    const rtmix::MixtureTruth t{truth->beta,    truth->delta,
                                truth->p_sr,    truth->p_or,
                                truth->sigma_e, truth->sigma_e_prime,
                                truth->sigma_u, truth->sigma_w};
    const rtmix::DesignSpec d{design->n_participants, design->n_items,
                              design->seed};
    *out = new rtmix_dataset{rtmix::gen_mixture(t, d).dataset};
  });
}

rtmix_status rtmix_recovery_check(const rtmix_fit* fit, const char* const* names,
                                  const double* values, size_t n, double level,
                                  rtmix_recovery** out) {
  if (!fit || !out || (n > 0 && (!names || !values)))
    return null_argument("argument");
  return guarded([&] {
    rtmix::NamedValues truth;
    for (size_t i = 0; i < n; ++i) {
      if (!names[i]) throw rtmix::AlignmentError("null parameter name");
      truth.emplace_back(names[i], values[i]);
    }
    *out = new rtmix_recovery{rtmix::recovery_check(truth, fit->draws, level)};
  });
}

double rtmix_recovery_coverage(const rtmix_recovery* r) {
  return r ? r->value.coverage_rate : std::numeric_limits<double>::quiet_NaN();
}

rtmix_status rtmix_recovery_json(const rtmix_recovery* r, char* buf, size_t cap,
                                 size_t* len) {
  if (!r) return null_argument("recovery");
  return copy_text(rtmix::recovery_json(r->value), buf, cap, len);
}

void rtmix_recovery_free(rtmix_recovery* r) { delete r; }

rtmix_status rtmix_ppc_run(const rtmix_fit* fit, const rtmix_dataset* dataset,
                           size_t replicates, uint64_t seed, rtmix_ppc** out) {
  if (!fit || !dataset || !out) return null_argument("argument");
  return guarded([&] {
    *out = new rtmix_ppc{rtmix::posterior_predictive(
        fit->draws, fit->kind, dataset->value, replicates, seed)};
  });
}

size_t rtmix_ppc_extreme_count(const rtmix_ppc* p) {
  size_t n = 0;
  if (p)
    for (const auto& s : p->value.statistics) n += s.extreme;
  return n;
}

rtmix_status rtmix_ppc_save_json(const rtmix_ppc* p, const char* path) {
  if (!p || !path) return null_argument("argument");
  return guarded([&] {
    write_file(path, [&](std::ostream& o) { o << rtmix::ppc_json(p->value); });
  });
}

rtmix_status rtmix_ppc_save_csv(const rtmix_ppc* p, const char* path) {
  if (!p || !path) return null_argument("argument");
  return guarded([&] {
    write_file(path, [&](std::ostream& o) { rtmix::write_ppc_csv(p->value, o); });
  });
}

rtmix_status rtmix_ppc_table(const rtmix_ppc* p, char* buf, size_t cap,
                             size_t* len) {
  if (!p) return null_argument("ppc");
  return copy_text(rtmix::ppc_table(p->value), buf, cap, len);
}

void rtmix_ppc_free(rtmix_ppc* p) { delete p; }

}  // extern "C"
