#include "fsll/fsll.h"

#include <cmath>
#include <cstring>
#include <limits>
#include <string>

#include "fsll/errors.hpp"
#include "fsll/harness.hpp"

struct fsll_dataset {
  fsll::Dataset data;
};
struct fsll_truth {
  fsll::TruthSpec spec;
};
struct fsll_model {
  fsll::LoadedModel model;
};
struct fsll_trace {
  fsll::FitTrace trace;
};

namespace {

thread_local std::string g_last_error;

struct InvalidArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

template <class T>
void require(const T* p, const char* what) {
  if (p == nullptr) throw InvalidArgument(std::string(what) + " must not be null");
}

template <class Fn>
fsll_status call(Fn&& fn) {
  auto fail = [](fsll_status status, const char* what) {
    g_last_error = what;
    return status;
  };
  try {
    g_last_error.clear();
    fn();
    return FSLL_OK;
  } catch (const InvalidArgument& e) {
    return fail(FSLL_ERR_INVALID_ARGUMENT, e.what());
  } catch (const fsll::IndexError& e) {
    return fail(FSLL_ERR_INDEX, e.what());
  } catch (const fsll::DomainError& e) {
    return fail(FSLL_ERR_DOMAIN, e.what());
  } catch (const fsll::NumericError& e) {
    return fail(FSLL_ERR_NUMERIC, e.what());
  } catch (const fsll::CapacityError& e) {
    return fail(FSLL_ERR_CAPACITY, e.what());
  } catch (const fsll::IoError& e) {
    return fail(FSLL_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(FSLL_ERR_CAPACITY, "out of memory");
  } catch (const std::exception& e) {
    return fail(FSLL_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(FSLL_ERR_INTERNAL, "unknown exception");
  }
}

std::string opt(const char* s) { return s ? std::string(s) : std::string(); }

fsll::ModelKind to_cpp(fsll_model_kind k) {
  switch (k) {
    case FSLL_MODEL_FSLL: return fsll::ModelKind::fsll;
    case FSLL_MODEL_BM_DI: return fsll::ModelKind::bm_di;
    case FSLL_MODEL_BM_PCD: return fsll::ModelKind::bm_pcd;
    case FSLL_MODEL_BM: return fsll::ModelKind::bm;
  }
  throw InvalidArgument("unknown model kind");
}

fsll_model_kind to_c(fsll::ModelKind k) {
  switch (k) {
    case fsll::ModelKind::fsll: return FSLL_MODEL_FSLL;
    case fsll::ModelKind::bm_di: return FSLL_MODEL_BM_DI;
    case fsll::ModelKind::bm_pcd: return FSLL_MODEL_BM_PCD;
    case fsll::ModelKind::bm: return FSLL_MODEL_BM;
  }
  return FSLL_MODEL_BM;
}

fsll::FitConfig to_cpp(const fsll_fit_config& c) {
  fsll::FitConfig f;
  f.epsilon = c.epsilon;
  f.max_iters = c.max_iters;
  f.prune = c.prune != 0;
  f.refresh_every = c.refresh_every;
  f.seed = c.seed;
  return f;
}

fsll::PcdConfig to_cpp(const fsll_pcd_config& c) {
  fsll::PcdConfig p;
  p.learning_rate = c.learning_rate;
  p.chains = c.chains;
  p.steps = c.steps;
  p.seed = c.seed;
  p.sweeps_per_step = c.sweeps_per_step;
  return p;
}

void to_c(const fsll::RunReport& r, fsll_run_report* out) {
  if (!out) return;
  std::memset(out, 0, sizeof *out);
  std::strncpy(out->dataset, r.dataset.c_str(), sizeof out->dataset - 1);
  out->model = to_c(r.model);
  out->kl_pd = r.kl_pd;
  out->kl_pstar = r.kl_pstar;
  out->basis_count = r.basis_count;
  out->wall_ms = r.wall_ms;
  out->seed = r.seed;
  out->mdl_cost = r.mdl_cost;
  out->description_length = r.description_length;
}

fsll::RunReport to_cpp(const fsll_run_report& r) {
  fsll::RunReport out;
  out.dataset = std::string(r.dataset, strnlen(r.dataset, sizeof r.dataset));
  out.model = to_cpp(r.model);
  out.kl_pd = r.kl_pd;
  out.kl_pstar = r.kl_pstar;
  out.basis_count = r.basis_count;
  out.wall_ms = r.wall_ms;
  out.seed = r.seed;
  out.mdl_cost = r.mdl_cost;
  out.description_length = r.description_length;
  return out;
}

void copy_table(const fsll::DenseTable& t, double* values, size_t capacity, size_t* size) {
  if (size) *size = t.size();
  if (!values) return;
  if (capacity < t.size()) throw fsll::CapacityError("output buffer too small for joint table");
  std::memcpy(values, t.values.data(), t.size() * sizeof(double));
}

}  // namespace

extern "C" {

const char* fsll_last_error(void) { return g_last_error.c_str(); }

const char* fsll_status_name(fsll_status status) {
  switch (status) {
    case FSLL_OK: return "ok";
    case FSLL_ERR_INVALID_ARGUMENT: return "invalid argument";
    case FSLL_ERR_INDEX: return "index error";
    case FSLL_ERR_DOMAIN: return "domain error";
    case FSLL_ERR_NUMERIC: return "numeric error";
    case FSLL_ERR_CAPACITY: return "capacity error";
    case FSLL_ERR_IO: return "io error";
    case FSLL_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* fsll_version(void) { return "1.0.0"; }

fsll_status fsll_dataset_create(const int* cards, size_t n_vars, const int* rows, size_t n_rows, fsll_dataset** out) {
  return call([&] {
    require(cards, "cards");
    require(out, "out");
    if (n_rows > 0) require(rows, "rows");
    fsll::VariableSpec spec(std::vector<int>(cards, cards + n_vars));
    std::vector<std::size_t> flat;
    flat.reserve(n_rows);
    for (size_t r = 0; r < n_rows; ++r)
      flat.push_back(spec.pack(std::span<const int>(rows + r * n_vars, n_vars)));
    *out = new fsll_dataset{fsll::Dataset(spec, std::move(flat))};
  });
}

fsll_status fsll_dataset_load(const char* path, fsll_dataset** out) {
  return call([&] {
    require(path, "path");
    require(out, "out");
    *out = new fsll_dataset{fsll::load_dataset(path)};
  });
}

fsll_status fsll_dataset_save(const fsll_dataset* data, const char* path) {
  return call([&] {
    require(data, "data");
    require(path, "path");
    fsll::save_dataset(path, data->data);
  });
}

fsll_status fsll_dataset_shape(const fsll_dataset* data, size_t* n_vars, size_t* n_rows) {
  return call([&] {
    require(data, "data");
    if (n_vars) *n_vars = static_cast<size_t>(data->data.spec().n());
    if (n_rows) *n_rows = data->data.rows();
  });
}

fsll_status fsll_dataset_row(const fsll_dataset* data, size_t r, int* values) {
  return call([&] {
    require(data, "data");
    require(values, "values");
    if (r >= data->data.rows()) throw fsll::IndexError("row index out of range");
    const auto row = data->data.row(r);
    std::copy(row.begin(), row.end(), values);
  });
}

void fsll_dataset_free(fsll_dataset* data) { delete data; }

fsll_status fsll_truth_ising(int rows, int cols, double coupling, fsll_truth** out) {
  return call([&] {
    require(out, "out");
    fsll::IsingGridSpec spec{rows, cols, coupling};
    (void)fsll::ising_true_distribution(spec);  // validates size
    *out = new fsll_truth{spec};
  });
}

fsll_status fsll_truth_bayes_net(int nodes, int max_parents, uint64_t seed, fsll_truth** out) {
  return call([&] {
    require(out, "out");
    *out = new fsll_truth{fsll::random_bayes_net(nodes, max_parents, seed)};
  });
}

fsll_status fsll_truth_table(const int* cards, size_t n_vars, const double* values, size_t n_values, fsll_truth** out) {
  return call([&] {
    require(cards, "cards");
    require(values, "values");
    require(out, "out");
    fsll::VariableSpec spec(std::vector<int>(cards, cards + n_vars));
    fsll::TableTruth t{fsll::DenseTable(spec, std::vector<double>(values, values + n_values),
                                        fsll::TableKind::distribution)};
    (void)fsll::truth_distribution(t);
    *out = new fsll_truth{std::move(t)};
  });
}

fsll_status fsll_truth_load(const char* path, fsll_truth** out) {
  return call([&] {
    require(path, "path");
    require(out, "out");
    *out = new fsll_truth{fsll::load_truth(path)};
  });
}

fsll_status fsll_truth_save(const fsll_truth* truth, const char* path) {
  return call([&] {
    require(truth, "truth");
    require(path, "path");
    fsll::save_truth(path, truth->spec);
  });
}

fsll_status fsll_truth_sample(const fsll_truth* truth, uint64_t count, uint64_t seed, fsll_dataset** out) {
  return call([&] {
    require(truth, "truth");
    require(out, "out");
    *out = new fsll_dataset{fsll::sample(fsll::truth_distribution(truth->spec), count, seed)};
  });
}

fsll_status fsll_truth_density(const fsll_truth* truth, double* values, size_t capacity, size_t* size) {
  return call([&] {
    require(truth, "truth");
    copy_table(fsll::truth_distribution(truth->spec), values, capacity, size);
  });
}

void fsll_truth_free(fsll_truth* truth) { delete truth; }

void fsll_fit_config_default(fsll_fit_config* config) {
  if (!config) return;
  const fsll::FitConfig d;
  config->epsilon = d.epsilon;
  config->max_iters = d.max_iters;
  config->prune = d.prune ? 1 : 0;
  config->refresh_every = d.refresh_every;
  config->seed = d.seed;
}

fsll_status fsll_fit(const fsll_dataset* data, const fsll_fit_config* config, fsll_model** model, fsll_trace** trace) {
  return call([&] {
    require(data, "data");
    require(model, "model");
    fsll_fit_config c;
    fsll_fit_config_default(&c);
    if (config) c = *config;
    auto result = fsll::fit(data->data, to_cpp(c));
    *model = new fsll_model{fsll::LoadedModel{std::move(result.model), fsll::ModelKind::fsll}};
    if (trace) *trace = new fsll_trace{std::move(result.trace)};
  });
}

size_t fsll_trace_length(const fsll_trace* trace) { return trace ? trace->trace.records.size() : 0; }

int fsll_trace_converged(const fsll_trace* trace) {
  return trace && trace->trace.status == fsll::FitStatus::converged ? 1 : 0;
}

fsll_status fsll_trace_cost(const fsll_trace* trace, size_t i, double* cost) {
  return call([&] {
    require(trace, "trace");
    require(cost, "cost");
    if (i >= trace->trace.records.size()) throw fsll::IndexError("trace index out of range");
    *cost = trace->trace.records[i].cost;
  });
}

fsll_status fsll_trace_save(const fsll_trace* trace, const char* path) {
  return call([&] {
    require(trace, "trace");
    require(path, "path");
    fsll::save_trace_csv(path, trace->trace);
  });
}

void fsll_trace_free(fsll_trace* trace) { delete trace; }

void fsll_pcd_config_default(fsll_pcd_config* config) {
  if (!config) return;
  const fsll::PcdConfig d;
  config->learning_rate = d.learning_rate;
  config->chains = d.chains;
  config->steps = d.steps;
  config->seed = d.seed;
  config->sweeps_per_step = d.sweeps_per_step;
}

fsll_status fsll_fit_bm_di(const fsll_dataset* data, double tolerance, int max_iters, fsll_model** model) {
  return call([&] {
    require(data, "data");
    require(model, "model");
    auto result = fsll::bm_di_fit(data->data, tolerance, max_iters);
    *model = new fsll_model{fsll::LoadedModel{std::move(result.params), fsll::ModelKind::bm_di}};
  });
}

fsll_status fsll_fit_bm_pcd(const fsll_dataset* data, const fsll_pcd_config* config, fsll_model** model) {
  return call([&] {
    require(data, "data");
    require(model, "model");
    fsll_pcd_config c;
    fsll_pcd_config_default(&c);
    if (config) c = *config;
    auto params = fsll::bm_pcd_fit(data->data, to_cpp(c));
    *model = new fsll_model{fsll::LoadedModel{std::move(params), fsll::ModelKind::bm_pcd}};
  });
}

fsll_status fsll_model_load(const char* path, fsll_model** out) {
  return call([&] {
    require(path, "path");
    require(out, "out");
    *out = new fsll_model{fsll::load_any_model(path)};
  });
}

fsll_status fsll_model_save(const fsll_model* model, const char* path) {
  return call([&] {
    require(model, "model");
    require(path, "path");
    if (const auto* m = std::get_if<fsll::ModelState>(&model->model.model))
      fsll::save_model(path, *m);
    else
      fsll::save_bm(path, std::get<fsll::BmParams>(model->model.model),
                    model->model.kind == fsll::ModelKind::bm ? std::string() : fsll::to_string(model->model.kind));
  });
}

fsll_model_kind fsll_model_get_kind(const fsll_model* model) {
  return model ? to_c(model->model.kind) : FSLL_MODEL_FSLL;
}

size_t fsll_model_basis_count(const fsll_model* model) { return model ? model->model.basis_count() : 0; }

fsll_status fsll_model_density(const fsll_model* model, double* values, size_t capacity, size_t* size) {
  return call([&] {
    require(model, "model");
    copy_table(model->model.density(), values, capacity, size);
  });
}

fsll_status fsll_model_kl_data(const fsll_model* model, const fsll_dataset* data, double* kl) {
  return call([&] {
    require(model, "model");
    require(data, "data");
    require(kl, "kl");
    *kl = fsll::kl(fsll::empirical_distribution(data->data), model->model.density());
  });
}

fsll_status fsll_model_kl_truth(const fsll_model* model, const fsll_truth* truth, double* kl) {
  return call([&] {
    require(model, "model");
    require(truth, "truth");
    require(kl, "kl");
    *kl = fsll::kl(fsll::truth_distribution(truth->spec), model->model.density());
  });
}

void fsll_model_free(fsll_model* model) { delete model; }

void fsll_gen_request_default(fsll_gen_request* req) {
  if (!req) return;
  const fsll::GenRequest d;
  req->family = FSLL_GEN_ISING;
  req->rows = d.rows;
  req->cols = d.cols;
  req->coupling = d.coupling;
  req->nodes = d.nodes;
  req->samples = d.samples;
  req->seed = d.seed;
  req->truth_path = nullptr;
  req->data_path = nullptr;
}

void fsll_fit_request_default(fsll_fit_request* req) {
  if (!req) return;
  std::memset(req, 0, sizeof *req);
  const fsll::FitRequest d;
  req->kind = FSLL_MODEL_FSLL;
  fsll_fit_config_default(&req->fsll);
  req->di_tolerance = d.di_tolerance;
  req->di_max_iters = d.di_max_iters;
  fsll_pcd_config_default(&req->pcd);
}

void fsll_bench_request_default(fsll_bench_request* req) {
  if (!req) return;
  static const uint64_t kSeeds[] = {1, 2, 3};
  req->preset = FSLL_BENCH_DESK;
  req->seeds = kSeeds;
  req->n_seeds = 3;
  req->out_dir = nullptr;
  req->include_bm_di = 0;
  req->parallel_cells = 0;
  req->pcd_steps = fsll::PcdConfig{}.steps;
}

fsll_status fsll_run_gen(const fsll_gen_request* req) {
  return call([&] {
    require(req, "request");
    fsll::GenRequest g;
    switch (req->family) {
      case FSLL_GEN_ISING: g.family = fsll::GenFamily::ising; break;
      case FSLL_GEN_BN2: g.family = fsll::GenFamily::bn2; break;
      case FSLL_GEN_BN3: g.family = fsll::GenFamily::bn3; break;
      default: throw InvalidArgument("unknown generator family");
    }
    g.rows = req->rows;
    g.cols = req->cols;
    g.coupling = req->coupling;
    g.nodes = req->nodes;
    g.samples = req->samples;
    g.seed = req->seed;
    g.truth_path = opt(req->truth_path);
    g.data_path = opt(req->data_path);
    fsll::run_gen(g);
  });
}

fsll_status fsll_run_fit(const fsll_fit_request* req, fsll_run_report* report) {
  return call([&] {
    require(req, "request");
    require(req->data_path, "data_path");
    fsll::FitRequest f;
    f.kind = to_cpp(req->kind);
    f.data_path = req->data_path;
    f.truth_path = opt(req->truth_path);
    f.model_path = opt(req->model_path);
    f.trace_path = opt(req->trace_path);
    f.report_path = opt(req->report_path);
    f.dataset_name = opt(req->dataset_name);
    f.fsll = to_cpp(req->fsll);
    f.di_tolerance = req->di_tolerance;
    f.di_max_iters = req->di_max_iters;
    f.pcd = to_cpp(req->pcd);
    to_c(fsll::run_fit(f), report);
  });
}

fsll_status fsll_run_eval(const fsll_eval_request* req, fsll_run_report* report) {
  return call([&] {
    require(req, "request");
    require(req->model_path, "model_path");
    require(req->data_path, "data_path");
    fsll::EvalRequest e;
    e.model_path = req->model_path;
    e.data_path = req->data_path;
    e.truth_path = opt(req->truth_path);
    e.report_path = opt(req->report_path);
    e.dataset_name = opt(req->dataset_name);
    to_c(fsll::run_eval(e), report);
  });
}

fsll_status fsll_run_bench(const fsll_bench_request* req, size_t* rows_written) {
  return call([&] {
    require(req, "request");
    require(req->out_dir, "out_dir");
    fsll::BenchRequest b;
    b.preset = req->preset == FSLL_BENCH_FULL ? fsll::BenchPreset::full : fsll::BenchPreset::desk;
    if (req->n_seeds > 0) {
      require(req->seeds, "seeds");
      b.seeds.assign(req->seeds, req->seeds + req->n_seeds);
    }
    b.out_dir = req->out_dir;
    b.include_bm_di = req->include_bm_di != 0;
    b.parallel_cells = req->parallel_cells != 0;
    b.pcd_steps = req->pcd_steps;
    const auto rows = fsll::run_bench(b);
    if (rows_written) *rows_written = rows.size();
  });
}

fsll_status fsll_report_format(const fsll_run_report* report, char* buffer, size_t capacity) {
  return call([&] {
    require(report, "report");
    require(buffer, "buffer");
    const std::string text = fsll::report_header() + "\n" + fsll::report_row(to_cpp(*report)) + "\n";
    if (capacity < text.size() + 1) throw fsll::CapacityError("report buffer too small");
    std::memcpy(buffer, text.c_str(), text.size() + 1);
  });
}

}  // extern "C"
