#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fsll/core.hpp"

namespace fsll {

/// Below this cardinality a power-of-two local transform is a direct matrix
/// multiply; at or above it the butterfly WHT is used.
inline constexpr int kWhtMinCard = 32;

/// card x card matrix of +-1 entries; row j is the local basis function phi_j
/// evaluated at x = 0..card-1.
struct LocalBasis {
  int card = 0;
  std::vector<double> matrix;  // row-major
  bool is_wht = false;

  double operator()(int row, int col) const {
    return matrix[static_cast<std::size_t>(row) * static_cast<std::size_t>(card) + static_cast<std::size_t>(col)];
  }
};

/// Walsh-Hadamard matrix (Sylvester recursion) for powers of two; otherwise
/// row 0 all ones and row j > 0 equal to +1 at column j, -1 elsewhere.
LocalBasis local_basis(int card);

/// One basis per variable of spec.
std::vector<LocalBasis> make_bases(const VariableSpec& spec);

/// Expectations <Phi_y> indexed by the flat basis index y.
struct DualTable {
  VariableSpec spec;
  std::vector<double> values;

  double operator[](std::size_t y) const { return values[y]; }
  std::size_t size() const { return values.size(); }
};

/// Unnormalized in-place WHT: segment <- H_{2^k} segment.
void fast_wht_inplace(std::span<double> segment);

/// Replaces every strided local vector along `axis` by basis.matrix * vector.
void local_transform_inplace(std::span<double> values, const VariableSpec& spec, int axis,
                             const LocalBasis& basis);

DenseTable local_transform_pass(const DenseTable& table, int axis, const LocalBasis& basis);

/// g^{i+1} from g^i for i = 0..n-1, applied in place.
void dual_transform_inplace(std::span<double> values, const VariableSpec& spec,
                            const std::vector<LocalBasis>& bases);

/// output[y] = sum_x table[x] Phi_y(x). The input table is left untouched.
DualTable dual_transform(const DenseTable& table, const std::vector<LocalBasis>& bases);

/// Direct O(|X| n) evaluation of one dual entry.
double brute_force_dual(const DenseTable& table, const std::vector<LocalBasis>& bases, std::size_t y);

/// Phi_y(x) as the product of local basis entries.
double basis_value(const VariableSpec& spec, const std::vector<LocalBasis>& bases, std::size_t y,
                   std::size_t x);

/// Calls fn(x, sign) for x = 0..|X|-1 in order, sign = Phi_y(x). Only the
/// axes where y has a nonzero digit contribute, and the running product is
/// maintained incrementally so the cost is amortized O(1) per x.
template <class Fn>
void for_each_basis_sign(const VariableSpec& spec, const std::vector<LocalBasis>& bases, std::size_t y,
                         Fn&& fn) {
  const int n = spec.n();
  const auto un = static_cast<std::size_t>(n);
  std::vector<int> ydig = spec.unpack(y);
  // factor(i, x_i) = phi^i_{y_i}(x_i)
  auto factor = [&](int i, int xi) { return bases[static_cast<std::size_t>(i)](ydig[static_cast<std::size_t>(i)], xi); };

  std::vector<int> digits(un, 0);
  // outer[i] = product of factors for axes i..n-1 at the current digits
  std::vector<double> outer(un + 1, 1.0);
  for (int i = n - 1; i >= 1; --i) outer[static_cast<std::size_t>(i)] = outer[static_cast<std::size_t>(i) + 1] * factor(i, 0);

  const int c0 = spec.card(0);
  std::vector<double> row0(static_cast<std::size_t>(c0));
  for (int x0 = 0; x0 < c0; ++x0) row0[static_cast<std::size_t>(x0)] = factor(0, x0);

  const std::size_t total = spec.size();
  std::size_t x = 0;
  while (x < total) {
    const double rest = n > 1 ? outer[1] : 1.0;
    for (int x0 = 0; x0 < c0; ++x0, ++x) fn(x, rest * row0[static_cast<std::size_t>(x0)]);
    if (x >= total) break;
    int i = 1;
    while (++digits[static_cast<std::size_t>(i)] == spec.card(i)) {
      digits[static_cast<std::size_t>(i)] = 0;
      ++i;
    }
    for (int j = i; j >= 1; --j) {
      const auto uj = static_cast<std::size_t>(j);
      outer[uj] = outer[uj + 1] * factor(j, digits[uj]);
    }
  }
}

}  // namespace fsll
