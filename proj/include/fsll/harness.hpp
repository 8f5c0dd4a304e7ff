#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fsll/bm.hpp"
#include "fsll/generators.hpp"
#include "fsll/learner.hpp"
#include "fsll/model.hpp"

namespace fsll {

enum class ModelKind { fsll, bm_di, bm_pcd, bm };
std::string to_string(ModelKind kind);
ModelKind parse_model_kind(const std::string& text);

/// One Table 1 row. kl_pstar is NaN when no truth was supplied.
/// mdl_cost = kl_pd + penalty; description_length = cross-entropy + penalty (fsll only, else NaN).
struct RunReport {
  std::string dataset;
  ModelKind model = ModelKind::fsll;
  double kl_pd = 0.0;
  double kl_pstar = 0.0;
  std::size_t basis_count = 0;
  double wall_ms = 0.0;
  std::uint64_t seed = 0;
  std::string status = "ok";
  double mdl_cost = std::numeric_limits<double>::quiet_NaN();
  double description_length = std::numeric_limits<double>::quiet_NaN();
};

/// data,model,kl_pd,kl_pstar,basis,wall_ms,seed,status,mdl_cost,description_length
std::string report_header();
std::string report_row(const RunReport& r);
void save_reports(const std::string& path, const std::vector<RunReport>& rows);

/// Either kind of learned model, as stored on disk.
struct LoadedModel {
  std::variant<ModelState, BmParams> model;
  ModelKind kind = ModelKind::fsll;

  DenseTable density() const;
  std::size_t basis_count() const;
};
LoadedModel load_any_model(const std::string& path);

/// Fills kl_pd, kl_pstar, basis_count and the MDL columns from the parameters alone.
void score_model(const LoadedModel& model, const Dataset& data, const DenseTable* truth, RunReport& report);

enum class GenFamily { ising, bn2, bn3 };
GenFamily parse_gen_family(const std::string& text);

struct GenRequest {
  GenFamily family = GenFamily::ising;
  int rows = 5;
  int cols = 4;
  double coupling = 0.5;
  int nodes = 20;
  std::uint64_t samples = 1000;
  std::uint64_t seed = 0;
  std::string truth_path;
  std::string data_path;
};

struct GenResult {
  TruthSpec truth;
  Dataset data;
};

/// Builds the truth (structure seed and sample seed both derived from seed).
GenResult generate(const GenRequest& req);
void run_gen(const GenRequest& req);

struct FitRequest {
  ModelKind kind = ModelKind::fsll;
  std::string data_path;
  std::string truth_path;   // optional
  std::string model_path;   // optional
  std::string trace_path;   // optional, fsll only
  std::string report_path;  // optional
  std::string dataset_name; // defaults to the data file stem
  FitConfig fsll;
  double di_tolerance = 1e-6;
  int di_max_iters = 2000;
  PcdConfig pcd;
};

struct FitOutcome {
  RunReport report;
  std::optional<FitTrace> trace;
  std::vector<double> bm_cost_history;
};

/// Fits one model on an in-memory dataset and scores it.
FitOutcome fit_and_score(ModelKind kind, const Dataset& data, const DenseTable* truth, const FitRequest& req,
                         LoadedModel* out_model = nullptr);
RunReport run_fit(const FitRequest& req);

struct EvalRequest {
  std::string model_path;
  std::string truth_path;  // optional
  std::string data_path;
  std::string report_path; // optional
  std::string dataset_name;
};

/// Recomputes both KLs from the files alone.
RunReport run_eval(const EvalRequest& req);

enum class BenchPreset { desk, full };
BenchPreset parse_bench_preset(const std::string& text);

struct BenchRequest {
  BenchPreset preset = BenchPreset::desk;
  std::vector<std::uint64_t> seeds{1, 2, 3};
  std::string out_dir;
  bool include_bm_di = false;  // full preset only; desk always runs BM-DI
  bool parallel_cells = false;
  int pcd_steps = 10000;
};

struct BenchDataset {
  std::string name;
  GenRequest gen;
};

std::vector<BenchDataset> bench_datasets(BenchPreset preset);
std::vector<ModelKind> bench_models(const BenchRequest& req);

/// Writes runs.csv, table1.csv, trace_curves.csv and kl_bars.csv to out_dir.
std::vector<RunReport> run_bench(const BenchRequest& req);

}  // namespace fsll
