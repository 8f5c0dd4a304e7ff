#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "fsll/basis.hpp"
#include "fsll/core.hpp"

namespace fsll {

/// Nonzero parameters theta_y keyed by flat basis index. y = 0 is never stored
/// and setting a value to exactly 0 erases the entry.
class SparseTheta {
 public:
  using Map = std::map<std::size_t, double>;

  double get(std::size_t y) const {
    auto it = entries_.find(y);
    return it == entries_.end() ? 0.0 : it->second;
  }
  bool contains(std::size_t y) const { return entries_.count(y) != 0; }
  void set(std::size_t y, double value);
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  Map::const_iterator begin() const { return entries_.begin(); }
  Map::const_iterator end() const { return entries_.end(); }

  friend bool operator==(const SparseTheta&, const SparseTheta&) = default;

 private:
  Map entries_;
};

struct ModelState {
  VariableSpec spec;
  std::vector<LocalBasis> bases;
  SparseTheta theta;
  DenseTable p;  // normalized p_theta, kept in sync by apply_update
};

/// theta = 0, p uniform.
ModelState init_model(const VariableSpec& spec);

/// l_theta(x) = sum_y theta_y Phi_y(x) over the stored entries.
double log_unnormalized(const ModelState& state, std::size_t x);

/// Normalized exp(l_theta) over all x, recomputed from theta alone.
DenseTable recompute_density(const ModelState& state);

/// Sets theta[y] = new_value and rescales p in one O(|X|) pass: entries with
/// Phi_y = +1 are scaled by exp(new - old), the rest by its inverse, then p is
/// divided by the accumulated sum.
void apply_update(ModelState& state, std::size_t y, double new_value);

/// Builds a state whose p is recomputed from theta.
ModelState make_model(const VariableSpec& spec, SparseTheta theta);

// Model file: "# cards: ..." then "y_0,...,y_{n-1},theta" per stored entry, 17 significant digits.
void write_model(std::ostream& out, const ModelState& state);
ModelState read_model(std::istream& in);
void save_model(const std::string& path, const ModelState& state);
ModelState load_model(const std::string& path);

}  // namespace fsll
