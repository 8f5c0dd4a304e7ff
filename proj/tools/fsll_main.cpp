// fsll command-line tool: gen | fit | eval | bench.
// Uses only the C interface in fsll/fsll.h.
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fsll/fsll.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitIo = 4;

int exit_code(fsll_status s) {
  switch (s) {
    case FSLL_OK: return kExitOk;
    case FSLL_ERR_NUMERIC: return kExitNumeric;
    case FSLL_ERR_IO: return kExitIo;
    case FSLL_ERR_INVALID_ARGUMENT:
    case FSLL_ERR_INDEX:
    case FSLL_ERR_DOMAIN:
    case FSLL_ERR_CAPACITY: return kExitUsage;
    case FSLL_ERR_INTERNAL: return kExitInternal;
  }
  return kExitInternal;
}

int report_failure(const char* command, fsll_status s) {
  std::cerr << "fsll " << command << ": " << fsll_status_name(s) << ": " << fsll_last_error() << '\n';
  return exit_code(s);
}

const char* opt(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

void print_report(const fsll_run_report& report) {
  char buf[1024];
  if (fsll_report_format(&report, buf, sizeof buf) == FSLL_OK) std::cout << buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Full-span log-linear model learning and Boltzmann machine baselines.\n"
               "Set FSLL_THREADS to use more worker threads."};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a true distribution and an i.i.d. dataset");
  std::string family = "ising";
  fsll_gen_request greq;
  fsll_gen_request_default(&greq);
  std::string truth_out = "truth.txt";
  std::string data_out = "data.csv";
  gen->add_option("family", family, "ising | bn2 | bn3")->check(CLI::IsMember({"ising", "bn2", "bn3"}))->required();
  gen->add_option("--rows", greq.rows, "Ising grid rows");
  gen->add_option("--cols", greq.cols, "Ising grid columns");
  gen->add_option("--coupling", greq.coupling, "Ising coupling");
  gen->add_option("--nodes", greq.nodes, "Bayes net node count");
  gen->add_option("--n", greq.samples, "Sample count")->check(CLI::PositiveNumber);
  gen->add_option("--seed", greq.seed, "Seed for structure and sampling");
  gen->add_option("--truth-out", truth_out, "True distribution spec file");
  gen->add_option("--data-out", data_out, "Dataset file");

  // fit
  auto* fit = app.add_subcommand("fit", "Fit a model to a dataset");
  std::string kind = "fsll";
  std::string data_path, truth_path, model_out, trace_out, report_out, dataset_name;
  fsll_fit_request freq;
  fsll_fit_request_default(&freq);
  bool no_prune = false;
  fit->add_option("kind", kind, "fsll | bm-di | bm-pcd")->check(CLI::IsMember({"fsll", "bm-di", "bm-pcd"}))->required();
  fit->add_option("--data", data_path, "Dataset file")->required();
  fit->add_option("--truth", truth_path, "True distribution spec (enables kl_pstar)");
  fit->add_option("--model-out", model_out, "Model file to write");
  fit->add_option("--trace-out", trace_out, "Trace CSV (fsll only)");
  fit->add_option("--report-out", report_out, "Report CSV");
  fit->add_option("--name", dataset_name, "Dataset name used in the report");
  fit->add_option("--epsilon", freq.fsll.epsilon, "Halt threshold")->check(CLI::PositiveNumber);
  fit->add_option("--max-iters", freq.fsll.max_iters, "Iteration cap")->check(CLI::PositiveNumber);
  fit->add_flag("--no-prune", no_prune, "Evaluate every append candidate exactly");
  fit->add_option("--refresh-every", freq.fsll.refresh_every, "Recompute p from theta every k updates (0 = never)");
  fit->add_option("--seed", freq.fsll.seed, "Seed (recorded; used by bm-pcd)");
  fit->add_option("--tolerance", freq.di_tolerance, "BM-DI gradient max-norm tolerance");
  fit->add_option("--di-max-iters", freq.di_max_iters, "BM-DI iteration cap");
  fit->add_option("--lr", freq.pcd.learning_rate, "BM-PCD learning rate");
  fit->add_option("--chains", freq.pcd.chains, "BM-PCD persistent chains");
  fit->add_option("--steps", freq.pcd.steps, "BM-PCD steps");
  fit->add_option("--sweeps", freq.pcd.sweeps_per_step, "BM-PCD Gibbs sweeps per step");

  // eval
  auto* eval = app.add_subcommand("eval", "Score a model file against a dataset and a truth");
  std::string eval_model, eval_truth, eval_data, eval_report, eval_name;
  eval->add_option("--model", eval_model, "Model file")->required();
  eval->add_option("--truth", eval_truth, "True distribution spec");
  eval->add_option("--data", eval_data, "Dataset file")->required();
  eval->add_option("--report-out", eval_report, "Report CSV");
  eval->add_option("--name", eval_name, "Dataset name used in the report");

  // bench
  auto* bench = app.add_subcommand("bench", "Run the FL vs BM comparison");
  std::string preset = "desk";
  std::vector<std::uint64_t> seeds{1, 2, 3};
  std::string out_dir;
  fsll_bench_request breq;
  fsll_bench_request_default(&breq);
  bool with_di = false, parallel = false;
  bench->add_option("--preset", preset, "desk | full")->check(CLI::IsMember({"desk", "full"}));
  bench->add_option("--seeds", seeds, "Seeds, one trial each")->delimiter(',');
  bench->add_option("--out", out_dir, "Output directory")->required();
  bench->add_flag("--with-bm-di", with_di, "Include BM-DI in the full preset");
  bench->add_flag("--parallel", parallel, "Run cells concurrently (FSLL_THREADS workers)");
  bench->add_option("--pcd-steps", breq.pcd_steps, "BM-PCD steps per fit")->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  if (gen->parsed()) {
    greq.family = family == "ising" ? FSLL_GEN_ISING : family == "bn2" ? FSLL_GEN_BN2 : FSLL_GEN_BN3;
    greq.truth_path = opt(truth_out);
    greq.data_path = opt(data_out);
    if (auto s = fsll_run_gen(&greq); s != FSLL_OK) return report_failure("gen", s);
    return kExitOk;
  }

  if (fit->parsed()) {
    freq.kind = kind == "fsll" ? FSLL_MODEL_FSLL : kind == "bm-di" ? FSLL_MODEL_BM_DI : FSLL_MODEL_BM_PCD;
    freq.fsll.prune = no_prune ? 0 : 1;
    freq.pcd.seed = freq.fsll.seed;
    freq.data_path = data_path.c_str();
    freq.truth_path = opt(truth_path);
    freq.model_path = opt(model_out);
    freq.trace_path = opt(trace_out);
    freq.report_path = opt(report_out);
    freq.dataset_name = opt(dataset_name);
    fsll_run_report report;
    if (auto s = fsll_run_fit(&freq, &report); s != FSLL_OK) return report_failure("fit", s);
    print_report(report);
    return kExitOk;
  }

  if (eval->parsed()) {
    fsll_eval_request ereq{eval_model.c_str(), opt(eval_truth), eval_data.c_str(), opt(eval_report), opt(eval_name)};
    fsll_run_report report;
    if (auto s = fsll_run_eval(&ereq, &report); s != FSLL_OK) return report_failure("eval", s);
    print_report(report);
    return kExitOk;
  }

  if (bench->parsed()) {
    breq.preset = preset == "full" ? FSLL_BENCH_FULL : FSLL_BENCH_DESK;
    breq.seeds = seeds.data();
    breq.n_seeds = seeds.size();
    breq.out_dir = out_dir.c_str();
    breq.include_bm_di = with_di ? 1 : 0;
    breq.parallel_cells = parallel ? 1 : 0;
    size_t rows = 0;
    if (auto s = fsll_run_bench(&breq, &rows); s != FSLL_OK) return report_failure("bench", s);
    std::cout << "bench: " << rows << " runs written to " << out_dir << '\n';
    return kExitOk;
  }
  return kExitUsage;
}
