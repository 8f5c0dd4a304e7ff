#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "fsll/core.hpp"

namespace fsll {

inline constexpr int kMaxBmVars = 25;

/// Fully connected Boltzmann machine over n binary variables:
/// l(x) = sum_{i<j} w_ij x_i x_j + sum_i b_i x_i.
struct BmParams {
  int n = 0;
  std::vector<double> weights;  // upper triangle, row-major over (i, j), i < j
  std::vector<double> biases;

  BmParams() = default;
  explicit BmParams(int vars);

  std::size_t pair_index(int i, int j) const;  // i < j
  double weight(int i, int j) const { return weights[pair_index(i, j)]; }
  double& weight(int i, int j) { return weights[pair_index(i, j)]; }
  std::size_t parameter_count() const { return weights.size() + biases.size(); }

  /// Weights then biases.
  std::vector<double> flat() const;
  void assign(const std::vector<double>& flat);

  friend bool operator==(const BmParams&, const BmParams&) = default;
};

/// <x_i x_j> in pair_index order and <x_i>.
struct BmMoments {
  std::vector<double> pairs;
  std::vector<double> singles;

  std::vector<double> flat() const;
};

/// Exact normalized distribution by enumerating the 2^n states.
DenseTable bm_density(const BmParams& params);

/// Moments of any distribution over n binary variables, via the dual transform.
BmMoments bm_moments(const DenseTable& p);

/// d KL(p_d||p_theta) / d theta = model moments - data moments, flat order.
std::vector<double> bm_exact_gradient(const BmParams& params, const BmMoments& data_moments);

struct BmDiResult {
  BmParams params;
  std::vector<double> cost_history;  // KL after each accepted step, starting at theta = 0
  int iterations = 0;
  bool converged = false;
};

/// Minimizes KL(p_d||p_theta) with BFGS on the exact gradient until the
/// gradient max-norm is below tolerance or max_iters is reached.
BmDiResult bm_di_fit(const DenseTable& p_d, double tolerance = 1e-6, int max_iters = 2000);
BmDiResult bm_di_fit(const Dataset& data, double tolerance = 1e-6, int max_iters = 2000);

struct PcdConfig {
  double learning_rate = 0.01;
  int chains = 100;
  int steps = 10000;
  std::uint64_t seed = 0;
  int sweeps_per_step = 1;  // Gibbs sweeps per chain before each moment estimate

  void validate() const;
};

/// Persistent contrastive divergence: chains start uniform at random and
/// persist across steps; model moments come from the current chain states.
BmParams bm_pcd_fit(const Dataset& data, const PcdConfig& config);
BmParams bm_pcd_fit(const BmMoments& data_moments, int n, const PcdConfig& config);

/// Moments of the chain states after `steps` sweeps with fixed params.
BmMoments bm_gibbs_moments(const BmParams& params, int chains, int steps, std::uint64_t seed);

// BM model file: "# n: <n>" then "i,j,theta" records, j = n for biases.
void write_bm(std::ostream& out, const BmParams& params, const std::string& trainer = {});
BmParams read_bm(std::istream& in);
void save_bm(const std::string& path, const BmParams& params, const std::string& trainer = {});
BmParams load_bm(const std::string& path);

}  // namespace fsll
