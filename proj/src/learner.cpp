#include "fsll/learner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>

#include "fsll/errors.hpp"
#include "fsll/parallel.hpp"

namespace fsll {

namespace {

constexpr std::size_t kScanParallelMin = std::size_t{1} << 15;

struct Champion {
  std::optional<CandidateDelta> best;
  double delta = 0.0;  // only strictly improving candidates are accepted

  void offer(const CandidateDelta& c) {
    if (c.delta_cost < delta) {
      delta = c.delta_cost;
      best = c;
    }
  }
};

void scan_range(std::size_t y0, std::size_t y1, const SparseTheta& theta, const DualTable& theta_bar,
                const DualTable& d_bar, const RegularizerTable& r, bool prune, Champion& champ) {
  const std::uint64_t samples = r.samples;
  auto stored = theta.begin();
  while (stored != theta.end() && stored->first < y0) ++stored;
  for (std::size_t y = y0; y < y1; ++y) {
    const double t0 = theta_bar[y];
    const double d = d_bar[y];
    const double target = clamp_dual(d, samples);
    if (stored != theta.end() && stored->first == y) {
      const double theta_y0 = stored->second;
      ++stored;
      if (target != t0) {
        CandidateDelta adj{y, CandidateKind::adjust, 0.0, axis_kl_change(t0, d, target), 0.0};
        adj.new_theta = theta_y0 + std::atanh(target) - std::atanh(t0);
        champ.offer(adj);
      }
      champ.offer(CandidateDelta{y, CandidateKind::remove, 0.0, delta_remove(t0, d, theta_y0, r[y]), 0.0});
      continue;
    }
    const double bound = lower_bound_append(t0, d, r[y]);
    if (prune && !(bound < champ.delta)) continue;
    if (target == t0) continue;  // zero gain, only the penalty remains
    CandidateDelta app{y, CandidateKind::append, 0.0, axis_kl_change(t0, d, target) + r[y], bound};
    app.new_theta = std::atanh(target) - std::atanh(t0);
    champ.offer(app);
  }
}

// Same arithmetic as kl(), restricted to the support of p_d.
double kl_on_support(const std::vector<std::size_t>& support, const DenseTable& p_d, const DenseTable& q) {
  double sum = 0.0;
  for (std::size_t x : support) {
    if (q.values[x] <= 0.0) return std::numeric_limits<double>::infinity();
    sum += p_d.values[x] * std::log(p_d.values[x] / q.values[x]);
  }
  return sum;
}

double penalty(const SparseTheta& theta, const RegularizerTable& r) {
  double sum = 0.0;
  for (const auto& entry : theta) sum += r[entry.first];
  return sum;
}

}  // namespace

void FitConfig::validate() const {
  if (!(epsilon > 0.0)) throw DomainError("epsilon must be > 0");
  if (max_iters < 1) throw DomainError("max_iters must be >= 1");
  if (refresh_every < 0) throw DomainError("refresh_every must be >= 0");
}

std::string to_string(FitStatus status) {
  return status == FitStatus::converged ? "converged" : "iter-capped";
}

std::optional<CandidateDelta> scan_candidates(const SparseTheta& theta, const DualTable& theta_bar,
                                              const DualTable& d_bar, const RegularizerTable& r, bool prune) {
  const std::size_t size = theta_bar.size();
  if (d_bar.size() != size || r.values.size() != size) throw DomainError("scan: tables differ in size");
  const auto parts = static_cast<std::size_t>(thread_count());
  std::vector<Champion> champs(parts);
  // y = 0 is never a candidate.
  parallel_ranges(size - 1, kScanParallelMin, [&](std::size_t b, std::size_t e, std::size_t part) {
    scan_range(b + 1, e + 1, theta, theta_bar, d_bar, r, prune, champs[part]);
  });
  // Parts cover increasing y ranges, so strict < keeps the smallest y on ties.
  Champion overall;
  for (const auto& c : champs)
    if (c.best) overall.offer(*c.best);
  return overall.best;
}

double cost(const ModelState& state, const DenseTable& p_d, const RegularizerTable& r) {
  return kl(p_d, state.p) + penalty(state.theta, r);
}

FitResult fit(const Dataset& data, const FitConfig& config) {
  if (data.rows() < 2) throw DomainError("fit needs at least 2 samples");
  return fit_distribution(empirical_distribution(data), data.rows(), config);
}

FitResult fit_distribution(const DenseTable& p_d, std::uint64_t samples, const FitConfig& config) {
  config.validate();
  if (!is_distribution(p_d.view(), 1e-9)) throw DomainError("target must be a distribution");
  const auto start = std::chrono::steady_clock::now();
  const VariableSpec& spec = p_d.spec;

  FitResult result{init_model(spec), {}};
  ModelState& state = result.model;
  const DualTable d_bar = dual_transform(p_d, state.bases);
  const RegularizerTable r = regularizer(spec, samples);

  std::vector<std::size_t> support;
  for (std::size_t x = 0; x < p_d.size(); ++x)
    if (p_d.values[x] > 0.0) support.push_back(x);

  auto current_cost = [&] { return kl_on_support(support, p_d, state.p) + penalty(state.theta, r); };
  result.trace.initial_cost = current_cost();

  DualTable theta_bar{spec, std::vector<double>(spec.size())};
  int since_refresh = 0;
  result.trace.status = FitStatus::iter_capped;
  for (int iter = 1; iter <= config.max_iters; ++iter) {
    std::copy(state.p.values.begin(), state.p.values.end(), theta_bar.values.begin());
    dual_transform_inplace(theta_bar.values, spec, state.bases);

    const auto winner = scan_candidates(state.theta, theta_bar, d_bar, r, config.prune);
    if (!winner || -winner->delta_cost < config.epsilon) {
      result.trace.status = FitStatus::converged;
      break;
    }
    apply_update(state, winner->y, winner->kind == CandidateKind::remove ? 0.0 : winner->new_theta);
    if (config.refresh_every > 0 && ++since_refresh >= config.refresh_every) {
      state.p = recompute_density(state);
      since_refresh = 0;
    }
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    result.trace.records.push_back(
        TraceRecord{iter, winner->y, winner->kind, winner->delta_cost, current_cost(), ms});
  }
  return result;
}

void write_trace_csv(std::ostream& out, const FitTrace& trace) {
  out << "iter,y,kind,delta,cost,ms\n";
  for (const auto& rec : trace.records) {
    out << rec.iter << ',' << rec.y << ',' << to_string(rec.kind) << ',' << detail::format_real(rec.delta) << ','
        << detail::format_real(rec.cost) << ',' << detail::format_real(rec.ms) << '\n';
  }
}

void save_trace_csv(const std::string& path, const FitTrace& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_trace_csv(out, trace);
  if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace fsll
