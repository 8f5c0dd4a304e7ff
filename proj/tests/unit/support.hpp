#pragma once
// Hand-rolled generators and slow reference evaluators shared by the unit tests.

#include <bit>
#include <cmath>
#include <cstdint>
#include <vector>

#include "fsll/core.hpp"
#include "fsll/model.hpp"
#include "fsll/rng.hpp"

namespace testkit {

struct Gen {
  fsll::CounterRng rng;
  explicit Gen(std::uint64_t seed, std::uint64_t stream = 0) : rng(seed, stream) {}

  double uniform(double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }
  int integer(int lo, int hi) { return lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(hi - lo + 1))); }

  // Strictly positive random distribution.
  fsll::DenseTable distribution(const fsll::VariableSpec& spec) {
    std::vector<double> v(spec.size());
    double s = 0.0;
    for (auto& x : v) s += (x = 0.05 + rng.uniform());
    for (auto& x : v) x /= s;
    return fsll::DenseTable(spec, std::move(v), fsll::TableKind::distribution);
  }

  // Random spec with cards in [2, max_card] and |X| <= max_size.
  fsll::VariableSpec spec(int max_card, std::size_t max_size) {
    std::vector<int> cards;
    std::size_t size = 1;
    for (;;) {
      const int c = integer(2, max_card);
      if (size * static_cast<std::size_t>(c) > max_size) break;
      cards.push_back(c);
      size *= static_cast<std::size_t>(c);
      if (cards.size() >= 2 && rng.uniform() < 0.25) break;
    }
    if (cards.empty()) cards.push_back(2);
    return fsll::VariableSpec(cards);
  }

  fsll::SparseTheta theta(const fsll::VariableSpec& spec, int k, double scale) {
    fsll::SparseTheta t;
    while (static_cast<int>(t.size()) < k && t.size() + 1 < spec.size()) {
      const auto y = 1 + rng.below(spec.size() - 1);
      t.set(y, uniform(-scale, scale));
    }
    return t;
  }
};

// Local basis entry straight from the definitions: Sylvester ordering gives
// H[j][x] = (-1)^popcount(j & x); other cards use the +-1 identity pattern.
inline double phi(int card, int j, int x) {
  if (std::has_single_bit(static_cast<unsigned>(card)))
    return std::popcount(static_cast<unsigned>(j & x)) % 2 ? -1.0 : 1.0;
  if (j == 0) return 1.0;
  return j == x ? 1.0 : -1.0;
}

inline double Phi(const fsll::VariableSpec& spec, std::size_t y, std::size_t x) {
  const auto yd = spec.unpack(y);
  const auto xd = spec.unpack(x);
  double v = 1.0;
  for (int i = 0; i < spec.n(); ++i) v *= phi(spec.card(i), yd[i], xd[i]);
  return v;
}

inline double dual_entry(const std::vector<double>& p, const fsll::VariableSpec& spec, std::size_t y) {
  double s = 0.0;
  for (std::size_t x = 0; x < spec.size(); ++x) s += p[x] * Phi(spec, y, x);
  return s;
}

// exp(l_theta) / Z computed densely, in long double.
inline std::vector<double> density(const fsll::VariableSpec& spec, const fsll::SparseTheta& theta) {
  std::vector<long double> l(spec.size(), 0.0L);
  for (std::size_t x = 0; x < spec.size(); ++x)
    for (const auto& [y, t] : theta) l[x] += t * Phi(spec, y, x);
  long double z = 0.0L;
  for (auto& v : l) z += (v = std::exp(v));
  std::vector<double> p(spec.size());
  for (std::size_t x = 0; x < spec.size(); ++x) p[x] = static_cast<double>(l[x] / z);
  return p;
}

inline double log_z(const fsll::VariableSpec& spec, const fsll::SparseTheta& theta) {
  long double z = 0.0L;
  for (std::size_t x = 0; x < spec.size(); ++x) {
    long double l = 0.0L;
    for (const auto& [y, t] : theta) l += t * Phi(spec, y, x);
    z += std::exp(l);
  }
  return static_cast<double>(std::log(z));
}

inline double kl_ref(const std::vector<double>& p, const std::vector<double>& q) {
  long double s = 0.0L;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] > 0) s += p[i] * std::log(static_cast<long double>(p[i]) / q[i]);
  return static_cast<double>(s);
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace testkit
