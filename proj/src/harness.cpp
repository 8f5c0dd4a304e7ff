#include "fsll/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>
#include <map>
#include <sstream>

#include "fsll/cost.hpp"
#include "fsll/errors.hpp"
#include "fsll/parallel.hpp"
#include "fsll/rng.hpp"

namespace fsll {

namespace {

constexpr std::uint64_t kSampleStream = 0x5a3d;

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

std::string format_ms(double ms) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", ms);
  return buf;
}

std::string stem_of(const std::string& path) { return std::filesystem::path(path).stem().string(); }

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::string bm_trainer_of(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::string line;
  std::getline(in, line);
  if (std::getline(in, line) && line.rfind("# trainer:", 0) == 0) return detail::trim(line.substr(10));
  return {};
}

}  // namespace

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::fsll: return "fsll";
    case ModelKind::bm_di: return "bm-di";
    case ModelKind::bm_pcd: return "bm-pcd";
    case ModelKind::bm: return "bm";
  }
  return "?";
}

ModelKind parse_model_kind(const std::string& text) {
  if (text == "fsll" || text == "fl") return ModelKind::fsll;
  if (text == "bm-di") return ModelKind::bm_di;
  if (text == "bm-pcd") return ModelKind::bm_pcd;
  if (text == "bm") return ModelKind::bm;
  throw DomainError("unknown model kind '" + text + "'");
}

std::string report_header() {
  return "data,model,kl_pd,kl_pstar,basis,wall_ms,seed,status,mdl_cost,description_length";
}

std::string report_row(const RunReport& r) {
  const auto opt_real = [](double v) { return std::isnan(v) ? std::string{} : detail::format_real(v); };
  std::ostringstream os;
  os << r.dataset << ',' << to_string(r.model) << ',' << detail::format_real(r.kl_pd) << ','
     << opt_real(r.kl_pstar) << ',' << r.basis_count << ',' << format_ms(r.wall_ms) << ',' << r.seed << ','
     << r.status << ',' << opt_real(r.mdl_cost) << ',' << opt_real(r.description_length);
  return os.str();
}

void save_reports(const std::string& path, const std::vector<RunReport>& rows) {
  auto out = open_out(path);
  out << report_header() << '\n';
  for (const auto& r : rows) out << report_row(r) << '\n';
  if (!out) throw IoError("write to '" + path + "' failed");
}

DenseTable LoadedModel::density() const {
  if (const auto* m = std::get_if<ModelState>(&model)) return recompute_density(*m);
  return bm_density(std::get<BmParams>(model));
}

std::size_t LoadedModel::basis_count() const {
  if (const auto* m = std::get_if<ModelState>(&model)) return m->theta.size();
  return std::get<BmParams>(model).parameter_count();
}

LoadedModel load_any_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::string first;
  std::getline(in, first);
  in.close();
  if (first.rfind("# n:", 0) == 0) {
    const std::string trainer = bm_trainer_of(path);
    ModelKind kind = ModelKind::bm;
    if (!trainer.empty()) kind = parse_model_kind(trainer);
    return LoadedModel{load_bm(path), kind};
  }
  return LoadedModel{load_model(path), ModelKind::fsll};
}

void score_model(const LoadedModel& model, const Dataset& data, const DenseTable* truth, RunReport& report) {
  const DenseTable density = model.density();
  if (!(density.spec == data.spec())) throw DomainError("model and dataset have different variable specs");
  const DenseTable p_d = empirical_distribution(data);
  report.kl_pd = kl(p_d, density);
  report.kl_pstar = std::numeric_limits<double>::quiet_NaN();
  if (truth) {
    if (!(truth->spec == density.spec)) throw DomainError("model and truth have different variable specs");
    report.kl_pstar = kl(*truth, density);
  }
  report.basis_count = model.basis_count();
  report.mdl_cost = std::numeric_limits<double>::quiet_NaN();
  report.description_length = std::numeric_limits<double>::quiet_NaN();
  const auto* fl = std::get_if<ModelState>(&model.model);
  if (fl && data.rows() >= 2) {
    const RegularizerTable r = regularizer(data.spec(), data.rows());
    double penalty = 0.0;
    for (const auto& [y, value] : fl->theta) penalty += r.values[y];
    double entropy = 0.0;
    for (double v : p_d.values)
      if (v > 0.0) entropy -= v * std::log(v);
    report.mdl_cost = report.kl_pd + penalty;
    report.description_length = report.kl_pd + entropy + penalty;
  }
}

GenFamily parse_gen_family(const std::string& text) {
  if (text == "ising") return GenFamily::ising;
  if (text == "bn2") return GenFamily::bn2;
  if (text == "bn3") return GenFamily::bn3;
  throw DomainError("unknown generator family '" + text + "'");
}

GenResult generate(const GenRequest& req) {
  TruthSpec truth;
  switch (req.family) {
    case GenFamily::ising: truth = IsingGridSpec{req.rows, req.cols, req.coupling}; break;
    case GenFamily::bn2: truth = random_bayes_net(req.nodes, 2, req.seed); break;
    case GenFamily::bn3: truth = random_bayes_net(req.nodes, 3, req.seed); break;
  }
  const DenseTable dist = truth_distribution(truth);
  Dataset data = sample(dist, req.samples, derive_seed(req.seed, kSampleStream));
  return GenResult{std::move(truth), std::move(data)};
}

void run_gen(const GenRequest& req) {
  const auto result = generate(req);
  if (!req.truth_path.empty()) save_truth(req.truth_path, result.truth);
  if (!req.data_path.empty()) save_dataset(req.data_path, result.data);
}

FitOutcome fit_and_score(ModelKind kind, const Dataset& data, const DenseTable* truth, const FitRequest& req,
                         LoadedModel* out_model) {
  FitOutcome outcome;
  RunReport& rep = outcome.report;
  rep.dataset = req.dataset_name.empty() ? stem_of(req.data_path) : req.dataset_name;
  rep.model = kind;
  rep.kl_pstar = std::numeric_limits<double>::quiet_NaN();

  const auto start = std::chrono::steady_clock::now();
  LoadedModel model;
  switch (kind) {
    case ModelKind::fsll: {
      auto result = fit(data, req.fsll);
      rep.wall_ms = elapsed_ms(start);
      rep.seed = req.fsll.seed;
      outcome.trace = std::move(result.trace);
      model = LoadedModel{std::move(result.model), ModelKind::fsll};
      break;
    }
    case ModelKind::bm_di: {
      auto result = bm_di_fit(data, req.di_tolerance, req.di_max_iters);
      rep.wall_ms = elapsed_ms(start);
      rep.seed = req.fsll.seed;
      outcome.bm_cost_history = std::move(result.cost_history);
      model = LoadedModel{std::move(result.params), ModelKind::bm_di};
      break;
    }
    case ModelKind::bm_pcd: {
      auto params = bm_pcd_fit(data, req.pcd);
      rep.wall_ms = elapsed_ms(start);
      rep.seed = req.pcd.seed;
      model = LoadedModel{std::move(params), ModelKind::bm_pcd};
      break;
    }
    case ModelKind::bm: throw DomainError("choose bm-di or bm-pcd");
  }
  // Scored from the parameters alone, exactly as an evaluation run would.
  score_model(model, data, truth, rep);
  if (!std::isfinite(rep.kl_pd)) throw NumericError("fitted model assigns zero probability to training data");
  if (out_model) *out_model = std::move(model);
  return outcome;
}

RunReport run_fit(const FitRequest& req) {
  const Dataset data = load_dataset(req.data_path);
  std::optional<DenseTable> truth;
  if (!req.truth_path.empty()) {
    truth = truth_distribution(load_truth(req.truth_path));
    if (!(truth->spec == data.spec())) throw DomainError("truth and dataset have different variable specs");
  }
  LoadedModel model;
  auto outcome = fit_and_score(req.kind, data, truth ? &*truth : nullptr, req, &model);
  if (!req.model_path.empty()) {
    if (const auto* m = std::get_if<ModelState>(&model.model))
      save_model(req.model_path, *m);
    else
      save_bm(req.model_path, std::get<BmParams>(model.model), to_string(req.kind));
  }
  if (!req.trace_path.empty() && outcome.trace) save_trace_csv(req.trace_path, *outcome.trace);
  if (!req.report_path.empty()) save_reports(req.report_path, {outcome.report});
  return outcome.report;
}

RunReport run_eval(const EvalRequest& req) {
  const auto start = std::chrono::steady_clock::now();
  const LoadedModel model = load_any_model(req.model_path);
  const Dataset data = load_dataset(req.data_path);
  std::optional<DenseTable> truth;
  if (!req.truth_path.empty()) truth = truth_distribution(load_truth(req.truth_path));
  RunReport rep;
  rep.dataset = req.dataset_name.empty() ? stem_of(req.data_path) : req.dataset_name;
  rep.model = model.kind;
  score_model(model, data, truth ? &*truth : nullptr, rep);
  rep.wall_ms = elapsed_ms(start);
  if (!req.report_path.empty()) save_reports(req.report_path, {rep});
  return rep;
}

BenchPreset parse_bench_preset(const std::string& text) {
  if (text == "desk") return BenchPreset::desk;
  if (text == "full") return BenchPreset::full;
  throw DomainError("unknown bench preset '" + text + "'");
}

std::vector<BenchDataset> bench_datasets(BenchPreset preset) {
  const bool desk = preset == BenchPreset::desk;
  const int rows = desk ? 3 : 5;
  const int cols = 4;
  const int nodes = desk ? rows * cols : 20;
  std::vector<BenchDataset> out;
  for (const char* size : {"S", "L"}) {
    const std::uint64_t samples = std::string(size) == "S" ? 1000 : 100000;
    GenRequest ising;
    ising.family = GenFamily::ising;
    ising.rows = rows;
    ising.cols = cols;
    ising.samples = samples;
    out.push_back({"Ising" + std::to_string(rows) + "x" + std::to_string(cols) + size, ising});
    for (int k : {2, 3}) {
      GenRequest bn;
      bn.family = k == 2 ? GenFamily::bn2 : GenFamily::bn3;
      bn.nodes = nodes;
      bn.samples = samples;
      // 1 + 2 + ... + (k-1) + k (n - k) edges
      const int edges = k * (k - 1) / 2 + k * (nodes - k);
      out.push_back({"BN" + std::to_string(nodes) + "-" + std::to_string(edges) + size, bn});
    }
  }
  // Table 1 order: Ising S/L, BN-2 S/L, BN-3 S/L
  std::stable_sort(out.begin(), out.end(), [](const BenchDataset& a, const BenchDataset& b) {
    auto rank = [](const BenchDataset& d) { return static_cast<int>(d.gen.family); };
    return rank(a) < rank(b);
  });
  return out;
}

std::vector<ModelKind> bench_models(const BenchRequest& req) {
  if (req.preset == BenchPreset::desk || req.include_bm_di) return {ModelKind::fsll, ModelKind::bm_di, ModelKind::bm_pcd};
  return {ModelKind::fsll, ModelKind::bm_pcd};
}

std::vector<RunReport> run_bench(const BenchRequest& req) {
  if (req.out_dir.empty()) throw DomainError("bench needs an output directory");
  if (req.seeds.empty()) throw DomainError("bench needs at least one seed");
  std::filesystem::create_directories(req.out_dir);
  const auto datasets = bench_datasets(req.preset);
  const auto models = bench_models(req);

  struct Cell {
    std::size_t dataset;
    std::size_t model;
    std::size_t seed;
    RunReport report;
    std::vector<double> curve;
  };
  std::vector<Cell> cells;
  for (std::size_t d = 0; d < datasets.size(); ++d)
    for (std::size_t m = 0; m < models.size(); ++m)
      for (std::size_t s = 0; s < req.seeds.size(); ++s) cells.push_back(Cell{d, m, s, {}, {}});

  auto run_cell = [&](Cell& cell) {
    const auto& ds = datasets[cell.dataset];
    const std::uint64_t seed = req.seeds[cell.seed];
    RunReport& rep = cell.report;
    rep.dataset = ds.name;
    rep.model = models[cell.model];
    rep.seed = seed;
    rep.kl_pd = rep.kl_pstar = std::numeric_limits<double>::quiet_NaN();
    try {
      GenRequest gen = ds.gen;
      gen.seed = seed;
      const auto generated = generate(gen);
      const DenseTable truth = truth_distribution(generated.truth);
      FitRequest fr;
      fr.dataset_name = ds.name;
      fr.fsll.seed = seed;
      fr.pcd.seed = seed;
      fr.pcd.steps = req.pcd_steps;
      auto outcome = fit_and_score(rep.model, generated.data, &truth, fr);
      rep = outcome.report;
      rep.seed = seed;
      if (outcome.trace) {
        cell.curve.push_back(outcome.trace->initial_cost);
        for (const auto& r : outcome.trace->records) cell.curve.push_back(r.cost);
      } else {
        cell.curve = outcome.bm_cost_history;
      }
    } catch (const std::exception& e) {
      rep.status = std::string("error: ") + e.what();
      std::replace(rep.status.begin(), rep.status.end(), ',', ';');
      std::replace(rep.status.begin(), rep.status.end(), '\n', ' ');
    }
  };

  if (req.parallel_cells && thread_count() > 1) {
    // Cells run concurrently, never splitting a single timed fit.
    std::size_t next = 0;
    const auto workers = static_cast<std::size_t>(thread_count());
    std::vector<std::future<void>> pending;
    while (next < cells.size()) {
      pending.clear();
      for (std::size_t w = 0; w < workers && next < cells.size(); ++w, ++next)
        pending.push_back(std::async(std::launch::async, [&run_cell, &cells, next] { run_cell(cells[next]); }));
      for (auto& f : pending) f.get();
    }
  } else {
    for (auto& c : cells) run_cell(c);
  }

  std::vector<RunReport> reports;
  for (const auto& c : cells) reports.push_back(c.report);
  save_reports(req.out_dir + "/runs.csv", reports);

  auto table = open_out(req.out_dir + "/table1.csv");
  auto bars = open_out(req.out_dir + "/kl_bars.csv");
  table << "data,model,kl_pd,kl_pstar,basis,time_ms,trials\n";
  bars << "data,model,kl_pstar\n";
  for (std::size_t d = 0; d < datasets.size(); ++d) {
    for (std::size_t m = 0; m < models.size(); ++m) {
      std::vector<double> kpd, kps, basis, ms;
      for (const auto& c : cells) {
        if (c.dataset != d || c.model != m || c.report.status != "ok") continue;
        kpd.push_back(c.report.kl_pd);
        kps.push_back(c.report.kl_pstar);
        basis.push_back(static_cast<double>(c.report.basis_count));
        ms.push_back(c.report.wall_ms);
      }
      table << datasets[d].name << ',' << to_string(models[m]) << ',' << detail::format_real(median(kpd)) << ','
            << detail::format_real(median(kps)) << ',' << detail::format_real(median(basis)) << ','
            << format_ms(median(ms)) << ',' << kpd.size() << '\n';
      bars << datasets[d].name << ',' << to_string(models[m]) << ',' << detail::format_real(median(kps)) << '\n';
    }
  }
  auto curves = open_out(req.out_dir + "/trace_curves.csv");
  curves << "data,model,seed,iter,cost\n";
  for (const auto& c : cells)
    for (std::size_t i = 0; i < c.curve.size(); ++i)
      curves << c.report.dataset << ',' << to_string(c.report.model) << ',' << c.report.seed << ',' << i << ','
             << detail::format_real(c.curve[i]) << '\n';
  return reports;
}

}  // namespace fsll
