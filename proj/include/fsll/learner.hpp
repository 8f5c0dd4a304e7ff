#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fsll/basis.hpp"
#include "fsll/cost.hpp"
#include "fsll/model.hpp"

namespace fsll {

struct FitConfig {
  double epsilon = 1e-4;   // halt when the best candidate improves cost by less than this
  int max_iters = 10000;   // cap on accepted updates
  bool prune = true;       // lower-bound screening of append candidates
  int refresh_every = 512; // recompute p from theta after this many updates; 0 disables
  std::uint64_t seed = 0;  // carried into reports; the learner itself is deterministic

  void validate() const;
};

enum class FitStatus { converged, iter_capped };
std::string to_string(FitStatus status);

struct TraceRecord {
  int iter = 0;
  std::size_t y = 0;
  CandidateKind kind = CandidateKind::append;
  double delta = 0.0;  // predicted change in cost
  double cost = 0.0;   // cost after the update, recomputed from the tables
  double ms = 0.0;     // wall time since the fit started
};

struct FitTrace {
  double initial_cost = 0.0;
  std::vector<TraceRecord> records;
  FitStatus status = FitStatus::converged;
};

struct FitResult {
  ModelState model;
  FitTrace trace;
};

/// Best single-coordinate candidate with delta < 0, or nullopt when none
/// improves. Ties go to the smallest y. With prune on, an append candidate is
/// evaluated only when its lower bound is below the current champion.
std::optional<CandidateDelta> scan_candidates(const SparseTheta& theta, const DualTable& theta_bar,
                                              const DualTable& d_bar, const RegularizerTable& r, bool prune);

/// KL(p_d || p_theta) + sum of r_y over stored parameters.
double cost(const ModelState& state, const DenseTable& p_d, const RegularizerTable& r);

FitResult fit(const Dataset& data, const FitConfig& config);

/// Fits an explicit target table as if it were the empirical distribution of
/// `samples` draws.
FitResult fit_distribution(const DenseTable& p_d, std::uint64_t samples, const FitConfig& config);

/// CSV with header iter,y,kind,delta,cost,ms.
void write_trace_csv(std::ostream& out, const FitTrace& trace);
void save_trace_csv(const std::string& path, const FitTrace& trace);

}  // namespace fsll
