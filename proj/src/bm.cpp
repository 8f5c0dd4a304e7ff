#include "fsll/bm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <string_view>

#include "fsll/basis.hpp"
#include "fsll/errors.hpp"
#include "fsll/rng.hpp"

namespace fsll {

namespace {

void check_size(int n) {
  if (n < 1) throw DomainError("Boltzmann machine needs at least one variable");
  if (n > kMaxBmVars) {
    throw CapacityError("Boltzmann machine with " + std::to_string(n) + " variables exceeds enumeration limit " +
                        std::to_string(kMaxBmVars));
  }
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

// l(x) for every state. States are built by doubling: adding the top bit j to
// x < 2^j adds b_j + sum_{i<j} w_ij x_i, and that field is itself doubled.
std::vector<double> log_energy(const BmParams& params) {
  const int n = params.n;
  const std::size_t size = std::size_t{1} << n;
  std::vector<double> l(size, 0.0);
  std::vector<double> field(size / 2 + 1, 0.0);
  for (int j = 0; j < n; ++j) {
    const std::size_t half = std::size_t{1} << j;
    field[0] = params.biases[static_cast<std::size_t>(j)];
    for (int k = 0; k < j; ++k) {
      const std::size_t span = std::size_t{1} << k;
      const double w = params.weight(k, j);
      for (std::size_t x = 0; x < span; ++x) field[x | span] = field[x] + w;
    }
    for (std::size_t x = 0; x < half; ++x) l[x | half] = l[x] + field[x];
  }
  return l;
}

struct Evaluation {
  double kl = 0.0;
  std::vector<double> grad;
};

class DiObjective {
 public:
  DiObjective(const DenseTable& p_d, int n) : n_(n), data_(bm_moments(p_d)), data_flat_(data_.flat()) {
    for (double v : p_d.values)
      if (v > 0.0) neg_entropy_ += v * std::log(v);
  }

  Evaluation operator()(const BmParams& params) const {
    auto l = log_energy(params);
    const double top = *std::max_element(l.begin(), l.end());
    double z = 0.0;
    for (double& v : l) {
      v = std::exp(v - top);
      z += v;
    }
    for (double& v : l) v /= z;
    const double log_z = top + std::log(z);
    const auto theta = params.flat();
    DenseTable p(VariableSpec::binary(n_), std::move(l), TableKind::distribution);
    auto model = bm_moments(p).flat();
    Evaluation e;
    e.kl = neg_entropy_ + log_z - dot(theta, data_flat_);
    e.grad.resize(model.size());
    for (std::size_t k = 0; k < model.size(); ++k) e.grad[k] = model[k] - data_flat_[k];
    return e;
  }

 private:
  int n_;
  BmMoments data_;
  std::vector<double> data_flat_;
  double neg_entropy_ = 0.0;
};

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

BmMoments moments_of_rows(const Dataset& data) {
  const int n = data.spec().n();
  BmParams shape(n);
  BmMoments m{std::vector<double>(shape.weights.size(), 0.0), std::vector<double>(static_cast<std::size_t>(n), 0.0)};
  std::vector<std::uint64_t> pair_counts(shape.weights.size(), 0), single_counts(static_cast<std::size_t>(n), 0);
  for (std::size_t r = 0; r < data.rows(); ++r) {
    const std::size_t x = data.flat(r);
    for (int i = 0; i < n; ++i) {
      if (!((x >> i) & 1U)) continue;
      ++single_counts[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < n; ++j)
        if ((x >> j) & 1U) ++pair_counts[shape.pair_index(i, j)];
    }
  }
  const auto N = static_cast<double>(data.rows());
  for (std::size_t k = 0; k < pair_counts.size(); ++k) m.pairs[k] = static_cast<double>(pair_counts[k]) / N;
  for (std::size_t k = 0; k < single_counts.size(); ++k) m.singles[k] = static_cast<double>(single_counts[k]) / N;
  return m;
}

void require_binary(const VariableSpec& spec) {
  if (!spec.all_binary()) throw DomainError("Boltzmann machines need all-binary variables");
  check_size(spec.n());
}

// Chain states as 0/1 doubles, n per chain.
class GibbsChains {
 public:
  GibbsChains(int n, int chains, std::uint64_t seed)
      : n_(n), chains_(chains), state_(static_cast<std::size_t>(n) * static_cast<std::size_t>(chains)) {
    rngs_.reserve(static_cast<std::size_t>(chains));
    for (int c = 0; c < chains; ++c) rngs_.emplace_back(seed, static_cast<std::uint64_t>(c));
    for (int c = 0; c < chains; ++c)
      for (int i = 0; i < n; ++i) at(c, i) = rngs_[static_cast<std::size_t>(c)].uniform() < 0.5 ? 1.0 : 0.0;
  }

  // Full symmetric weight matrix for fast local fields.
  void load(const BmParams& p) {
    const auto un = static_cast<std::size_t>(n_);
    w_.assign(un * un, 0.0);
    for (int i = 0; i < n_; ++i)
      for (int j = i + 1; j < n_; ++j) {
        const double v = p.weight(i, j);
        w_[static_cast<std::size_t>(i) * un + static_cast<std::size_t>(j)] = v;
        w_[static_cast<std::size_t>(j) * un + static_cast<std::size_t>(i)] = v;
      }
    b_ = p.biases;
  }

  void sweep() {
    const auto un = static_cast<std::size_t>(n_);
    for (int c = 0; c < chains_; ++c) {
      double* x = &state_[static_cast<std::size_t>(c) * un];
      auto& rng = rngs_[static_cast<std::size_t>(c)];
      for (std::size_t i = 0; i < un; ++i) {
        const double* row = &w_[i * un];
        double field = b_[i];
        for (std::size_t j = 0; j < un; ++j) field += row[j] * x[j];
        const double p1 = 1.0 / (1.0 + std::exp(-field));
        x[i] = rng.uniform() < p1 ? 1.0 : 0.0;
      }
    }
  }

  BmMoments moments() const {
    BmParams shape(n_);
    BmMoments m{std::vector<double>(shape.weights.size(), 0.0), std::vector<double>(static_cast<std::size_t>(n_), 0.0)};
    const auto un = static_cast<std::size_t>(n_);
    for (int c = 0; c < chains_; ++c) {
      const double* x = &state_[static_cast<std::size_t>(c) * un];
      std::size_t k = 0;
      for (std::size_t i = 0; i < un; ++i) {
        m.singles[i] += x[i];
        for (std::size_t j = i + 1; j < un; ++j) m.pairs[k++] += x[i] * x[j];
      }
    }
    const auto inv = 1.0 / static_cast<double>(chains_);
    for (double& v : m.pairs) v *= inv;
    for (double& v : m.singles) v *= inv;
    return m;
  }

 private:
  double& at(int c, int i) { return state_[static_cast<std::size_t>(c) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(i)]; }

  int n_;
  int chains_;
  std::vector<double> state_;
  std::vector<CounterRng> rngs_;
  std::vector<double> w_;
  std::vector<double> b_;
};

}  // namespace

BmParams::BmParams(int vars) : n(vars) {
  check_size(vars);
  const auto un = static_cast<std::size_t>(vars);
  weights.assign(un * (un - 1) / 2, 0.0);
  biases.assign(un, 0.0);
}

std::size_t BmParams::pair_index(int i, int j) const {
  if (!(0 <= i && i < j && j < n)) throw IndexError("pair index requires 0 <= i < j < n");
  const auto ui = static_cast<std::size_t>(i);
  const auto un = static_cast<std::size_t>(n);
  return ui * (2 * un - ui - 1) / 2 + static_cast<std::size_t>(j - i - 1);
}

std::vector<double> BmParams::flat() const {
  std::vector<double> v = weights;
  v.insert(v.end(), biases.begin(), biases.end());
  return v;
}

void BmParams::assign(const std::vector<double>& flat) {
  if (flat.size() != parameter_count()) throw DomainError("parameter vector has wrong length");
  std::copy(flat.begin(), flat.begin() + static_cast<std::ptrdiff_t>(weights.size()), weights.begin());
  std::copy(flat.begin() + static_cast<std::ptrdiff_t>(weights.size()), flat.end(), biases.begin());
}

std::vector<double> BmMoments::flat() const {
  std::vector<double> v = pairs;
  v.insert(v.end(), singles.begin(), singles.end());
  return v;
}

DenseTable bm_density(const BmParams& params) {
  check_size(params.n);
  auto l = log_energy(params);
  const double top = *std::max_element(l.begin(), l.end());
  double z = 0.0;
  for (double& v : l) {
    v = std::exp(v - top);
    z += v;
  }
  for (double& v : l) v /= z;
  return DenseTable(VariableSpec::binary(params.n), std::move(l), TableKind::distribution);
}

BmMoments bm_moments(const DenseTable& p) {
  require_binary(p.spec);
  const int n = p.spec.n();
  // With phi_1(x) = 1 - 2x: <x_i> = (1 - <phi_i>)/2 and
  // <x_i x_j> = (1 - <phi_i> - <phi_j> + <phi_i phi_j>)/4.
  const DualTable dual = dual_transform(p, make_bases(p.spec));
  BmParams shape(n);
  BmMoments m{std::vector<double>(shape.weights.size()), std::vector<double>(static_cast<std::size_t>(n))};
  for (int i = 0; i < n; ++i) {
    const double ei = dual[std::size_t{1} << i];
    m.singles[static_cast<std::size_t>(i)] = (1.0 - ei) / 2.0;
    for (int j = i + 1; j < n; ++j) {
      const double ej = dual[std::size_t{1} << j];
      const double eij = dual[(std::size_t{1} << i) | (std::size_t{1} << j)];
      m.pairs[shape.pair_index(i, j)] = (1.0 - ei - ej + eij) / 4.0;
    }
  }
  return m;
}

std::vector<double> bm_exact_gradient(const BmParams& params, const BmMoments& data_moments) {
  const auto model = bm_moments(bm_density(params)).flat();
  const auto data = data_moments.flat();
  if (data.size() != model.size()) throw DomainError("moment vector has wrong length");
  std::vector<double> g(model.size());
  for (std::size_t k = 0; k < g.size(); ++k) g[k] = model[k] - data[k];
  return g;
}

BmDiResult bm_di_fit(const DenseTable& p_d, double tolerance, int max_iters) {
  require_binary(p_d.spec);
  const int n = p_d.spec.n();
  const DiObjective objective(p_d, n);

  BmDiResult result;
  result.params = BmParams(n);
  BmParams trial(n);
  const std::size_t m = result.params.parameter_count();
  std::vector<double> x(m, 0.0);
  Evaluation cur = objective(result.params);
  result.cost_history.push_back(cur.kl);

  // Dense inverse-Hessian approximation; m <= 325.
  std::vector<double> h(m * m, 0.0);
  auto reset_h = [&](double scale) {
    std::fill(h.begin(), h.end(), 0.0);
    for (std::size_t i = 0; i < m; ++i) h[i * m + i] = scale;
  };
  reset_h(1.0);
  bool scaled = false;

  constexpr double kArmijo = 1e-4;
  std::vector<double> dir(m), x_new(m), s(m), yv(m), hy(m);
  for (int it = 0; it < max_iters; ++it) {
    if (max_abs(cur.grad) < tolerance) {
      result.converged = true;
      break;
    }
    for (std::size_t i = 0; i < m; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < m; ++j) acc -= h[i * m + j] * cur.grad[j];
      dir[i] = acc;
    }
    double slope = dot(cur.grad, dir);
    if (!(slope < 0.0)) {
      reset_h(1.0);
      scaled = false;
      for (std::size_t i = 0; i < m; ++i) dir[i] = -cur.grad[i];
      slope = dot(cur.grad, dir);
    }
    double step = 1.0;
    bool accepted = false;
    Evaluation next;
    for (int k = 0; k < 60; ++k) {
      for (std::size_t i = 0; i < m; ++i) x_new[i] = x[i] + step * dir[i];
      trial.assign(x_new);
      next = objective(trial);
      if (std::isfinite(next.kl) && next.kl <= cur.kl + kArmijo * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // no further decrease representable
    for (std::size_t i = 0; i < m; ++i) {
      s[i] = x_new[i] - x[i];
      yv[i] = next.grad[i] - cur.grad[i];
    }
    const double sy = dot(s, yv);
    if (sy > 1e-12 * std::sqrt(dot(s, s) * dot(yv, yv))) {
      if (!scaled) {
        reset_h(sy / dot(yv, yv));
        scaled = true;
      }
      const double rho = 1.0 / sy;
      for (std::size_t i = 0; i < m; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < m; ++j) acc += h[i * m + j] * yv[j];
        hy[i] = acc;
      }
      const double yhy = dot(yv, hy);
      const double coef = rho * rho * yhy + rho;
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
          h[i * m + j] += -rho * (hy[i] * s[j] + s[i] * hy[j]) + coef * s[i] * s[j];
    }
    x = x_new;
    cur = std::move(next);
    result.params.assign(x);
    result.cost_history.push_back(cur.kl);
    result.iterations = it + 1;
  }
  if (max_abs(cur.grad) < tolerance) result.converged = true;
  return result;
}

BmDiResult bm_di_fit(const Dataset& data, double tolerance, int max_iters) {
  require_binary(data.spec());
  return bm_di_fit(empirical_distribution(data), tolerance, max_iters);
}

void PcdConfig::validate() const {
  if (!(learning_rate >= 0.0)) throw DomainError("learning rate must be >= 0");
  if (chains < 1 || steps < 0 || sweeps_per_step < 1) throw DomainError("PCD chains/steps must be positive");
}

BmParams bm_pcd_fit(const BmMoments& data_moments, int n, const PcdConfig& config) {
  config.validate();
  BmParams params(n);
  const auto target = data_moments.flat();
  if (target.size() != params.parameter_count()) throw DomainError("moment vector has wrong length");
  GibbsChains chains(n, config.chains, config.seed);
  std::vector<double> theta = params.flat();
  for (int step = 0; step < config.steps; ++step) {
    chains.load(params);
    for (int s = 0; s < config.sweeps_per_step; ++s) chains.sweep();
    const auto model = chains.moments().flat();
    for (std::size_t k = 0; k < theta.size(); ++k) theta[k] += config.learning_rate * (target[k] - model[k]);
    params.assign(theta);
  }
  return params;
}

BmParams bm_pcd_fit(const Dataset& data, const PcdConfig& config) {
  require_binary(data.spec());
  return bm_pcd_fit(moments_of_rows(data), data.spec().n(), config);
}

BmMoments bm_gibbs_moments(const BmParams& params, int chains, int steps, std::uint64_t seed) {
  check_size(params.n);
  GibbsChains gibbs(params.n, chains, seed);
  gibbs.load(params);
  for (int s = 0; s < steps; ++s) gibbs.sweep();
  return gibbs.moments();
}

void write_bm(std::ostream& out, const BmParams& params, const std::string& trainer) {
  out << "# n: " << params.n << '\n';
  if (!trainer.empty()) out << "# trainer: " << trainer << '\n';
  for (int i = 0; i < params.n; ++i)
    for (int j = i + 1; j < params.n; ++j)
      out << i << ',' << j << ',' << detail::format_real(params.weight(i, j)) << '\n';
  for (int i = 0; i < params.n; ++i)
    out << i << ',' << params.n << ',' << detail::format_real(params.biases[static_cast<std::size_t>(i)]) << '\n';
}

BmParams read_bm(std::istream& in) {
  static constexpr std::string_view kHeader = "# n:";
  std::string line;
  if (!std::getline(in, line) || line.rfind(kHeader, 0) != 0) throw IoError("BM file must start with '# n: <n>'");
  const auto nv = detail::parse_int_list(line.substr(kHeader.size()));
  if (nv.size() != 1) throw IoError("malformed BM header");
  BmParams params(nv[0]);
  std::vector<bool> seen(params.parameter_count(), false);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto f = detail::split(t, ',');
    if (f.size() != 3) throw IoError("BM line " + std::to_string(lineno) + ": expected i,j,theta");
    const int i = detail::parse_int_list(f[0]).front();
    const int j = detail::parse_int_list(f[1]).front();
    const double v = detail::parse_real(f[2]);
    std::size_t slot = 0;
    if (j == params.n && i >= 0 && i < params.n) {
      slot = params.weights.size() + static_cast<std::size_t>(i);
      params.biases[static_cast<std::size_t>(i)] = v;
    } else if (0 <= i && i < j && j < params.n) {
      slot = params.pair_index(i, j);
      params.weights[slot] = v;
    } else {
      throw IoError("BM line " + std::to_string(lineno) + ": bad index pair");
    }
    if (seen[slot]) throw IoError("BM line " + std::to_string(lineno) + ": duplicate parameter");
    seen[slot] = true;
  }
  return params;
}

void save_bm(const std::string& path, const BmParams& params, const std::string& trainer) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_bm(out, params, trainer);
  if (!out) throw IoError("write to '" + path + "' failed");
}

BmParams load_bm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  return read_bm(in);
}

}  // namespace fsll
