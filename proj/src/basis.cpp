#include "fsll/basis.hpp"

#include <algorithm>
#include <string>

#include "fsll/errors.hpp"
#include "fsll/parallel.hpp"

namespace fsll {

namespace {

bool is_power_of_two(std::size_t v) { return v != 0 && (v & (v - 1)) == 0; }

constexpr std::size_t kParallelMin = std::size_t{1} << 16;

// Elements per cache tile (256 KiB of doubles) and the lane width used when
// a group of axes has a stride wider than one lane.
constexpr std::size_t kTile = std::size_t{1} << 15;
constexpr std::size_t kLane = 16;

// In-place butterflies over `mids` rows of width w laid out `pitch` apart.
void butterfly_rows(double* base, std::size_t mids, std::size_t pitch, std::size_t w) {
  for (std::size_t h = 1; h < mids; h *= 2) {
    for (std::size_t m = 0; m < mids; m += 2 * h) {
      for (std::size_t mm = m; mm < m + h; ++mm) {
        double* lo = base + mm * pitch;
        double* hi = lo + h * pitch;
        for (std::size_t j = 0; j < w; ++j) {
          const double a = lo[j];
          const double c = hi[j];
          lo[j] = a + c;
          hi[j] = a - c;
        }
      }
    }
  }
}

// Butterflies for `levels` consecutive binary axes, the first with stride s.
// The table splits into spans of s * 2^levels. A span narrower than a tile is
// transformed in place; otherwise it is cut into lane chunks that are copied
// to a contiguous buffer, transformed and copied back.
void binary_group(double* data, std::size_t size, std::size_t s, int levels, std::size_t w) {
  const std::size_t mids = std::size_t{1} << levels;
  const std::size_t span = s * mids;
  const std::size_t chunks = (s + w - 1) / w;
  const std::size_t units = (size / span) * chunks;
  parallel_ranges(units, kParallelMin / (w * mids) + 1, [&](std::size_t u0, std::size_t u1, std::size_t) {
    std::vector<double> buf(chunks > 1 ? w * mids : 0);
    for (std::size_t u = u0; u < u1; ++u) {
      const std::size_t offset = (u % chunks) * w;
      double* base = data + (u / chunks) * span + offset;
      if (chunks == 1) {
        butterfly_rows(base, mids, s, s);
        continue;
      }
      const std::size_t width = std::min(w, s - offset);
      for (std::size_t m = 0; m < mids; ++m) std::copy_n(base + m * s, width, buf.data() + m * width);
      butterfly_rows(buf.data(), mids, width, width);
      for (std::size_t m = 0; m < mids; ++m) std::copy_n(buf.data() + m * width, width, base + m * s);
    }
  });
}

// Consecutive binary axes starting at stride s, grouped so each group's
// working set fits one tile.
void binary_run(std::span<double> t, std::size_t s, int axes) {
  while (axes > 0) {
    const std::size_t w = s * 2 <= kTile ? s : kLane;
    int levels = 1;
    while (levels < axes && w * (std::size_t{2} << levels) <= kTile) ++levels;
    binary_group(t.data(), t.size(), s, levels, w);
    s <<= levels;
    axes -= levels;
  }
}

// General card: gather each strided local vector, transform, scatter.
void general_pass(std::span<double> t, std::size_t stride, const LocalBasis& basis) {
  const auto c = static_cast<std::size_t>(basis.card);
  const std::size_t block = c * stride;
  const std::size_t vectors = t.size() / c;
  const bool use_wht = basis.is_wht && basis.card >= kWhtMinCard;
  double* data = t.data();
  parallel_ranges(vectors, kParallelMin / c + 1, [&](std::size_t v0, std::size_t v1, std::size_t) {
    std::vector<double> in(c), out(c);
    std::size_t blk = v0 / stride;
    std::size_t o = v0 % stride;
    for (std::size_t v = v0; v < v1; ++v) {
      double* base = data + blk * block + o;
      for (std::size_t j = 0; j < c; ++j) in[j] = base[j * stride];
      if (use_wht) {
        fast_wht_inplace(in);
        for (std::size_t j = 0; j < c; ++j) base[j * stride] = in[j];
      } else {
        const double* m = basis.matrix.data();
        for (std::size_t r = 0; r < c; ++r) {
          double acc = 0.0;
          for (std::size_t j = 0; j < c; ++j) acc += m[r * c + j] * in[j];
          out[r] = acc;
        }
        for (std::size_t j = 0; j < c; ++j) base[j * stride] = out[j];
      }
      if (++o == stride) {
        o = 0;
        ++blk;
      }
    }
  });
}

}  // namespace

LocalBasis local_basis(int card) {
  if (card < 2) throw DomainError("local basis needs card >= 2, got " + std::to_string(card));
  LocalBasis b;
  b.card = card;
  const auto c = static_cast<std::size_t>(card);
  b.matrix.assign(c * c, 0.0);
  b.is_wht = is_power_of_two(c);
  if (b.is_wht) {
    // H_{2m} = [[H_m, H_m], [H_m, -H_m]]
    b.matrix[0] = 1.0;
    for (std::size_t m = 1; m < c; m *= 2) {
      for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t col = 0; col < m; ++col) {
          const double h = b.matrix[r * c + col];
          b.matrix[r * c + col + m] = h;
          b.matrix[(r + m) * c + col] = h;
          b.matrix[(r + m) * c + col + m] = -h;
        }
      }
    }
  } else {
    for (std::size_t col = 0; col < c; ++col) b.matrix[col] = 1.0;
    for (std::size_t r = 1; r < c; ++r)
      for (std::size_t col = 0; col < c; ++col) b.matrix[r * c + col] = (r == col) ? 1.0 : -1.0;
  }
  return b;
}

std::vector<LocalBasis> make_bases(const VariableSpec& spec) {
  std::vector<LocalBasis> bases;
  bases.reserve(static_cast<std::size_t>(spec.n()));
  for (int i = 0; i < spec.n(); ++i) bases.push_back(local_basis(spec.card(i)));
  return bases;
}

void fast_wht_inplace(std::span<double> segment) {
  const std::size_t n = segment.size();
  if (!is_power_of_two(n)) {
    throw DomainError("WHT length must be a power of two, got " + std::to_string(n));
  }
  for (std::size_t h = 1; h < n; h *= 2) {
    for (std::size_t i = 0; i < n; i += 2 * h) {
      for (std::size_t j = i; j < i + h; ++j) {
        const double a = segment[j];
        const double b = segment[j + h];
        segment[j] = a + b;
        segment[j + h] = a - b;
      }
    }
  }
}

void local_transform_inplace(std::span<double> values, const VariableSpec& spec, int axis,
                             const LocalBasis& basis) {
  if (axis < 0 || axis >= spec.n()) throw DomainError("axis " + std::to_string(axis) + " out of range");
  if (basis.card != spec.card(axis)) throw DomainError("basis card does not match variable card");
  if (values.size() != spec.size()) throw DomainError("table size does not match spec");
  if (basis.card == 2)
    binary_run(values, spec.stride(axis), 1);
  else
    general_pass(values, spec.stride(axis), basis);
}

DenseTable local_transform_pass(const DenseTable& table, int axis, const LocalBasis& basis) {
  DenseTable out(table.spec, table.values, TableKind::coefficients);
  local_transform_inplace(out.values, out.spec, axis, basis);
  return out;
}

void dual_transform_inplace(std::span<double> values, const VariableSpec& spec,
                            const std::vector<LocalBasis>& bases) {
  if (bases.size() != static_cast<std::size_t>(spec.n())) throw DomainError("need one basis per variable");
  if (values.size() != spec.size()) throw DomainError("table size does not match spec");
  for (int i = 0; i < spec.n();) {
    const auto& basis = bases[static_cast<std::size_t>(i)];
    if (basis.card != spec.card(i)) throw DomainError("basis card does not match variable card");
    if (basis.card != 2) {
      general_pass(values, spec.stride(i), basis);
      ++i;
      continue;
    }
    int run = 1;
    while (i + run < spec.n() && spec.card(i + run) == 2 && bases[static_cast<std::size_t>(i + run)].card == 2) ++run;
    binary_run(values, spec.stride(i), run);
    i += run;
  }
}

DualTable dual_transform(const DenseTable& table, const std::vector<LocalBasis>& bases) {
  if (table.values.size() != table.spec.size()) throw DomainError("table size does not match spec");
  DualTable out{table.spec, table.values};
  dual_transform_inplace(out.values, out.spec, bases);
  return out;
}

double basis_value(const VariableSpec& spec, const std::vector<LocalBasis>& bases, std::size_t y,
                   std::size_t x) {
  const auto yd = spec.unpack(y);
  const auto xd = spec.unpack(x);
  double v = 1.0;
  for (std::size_t i = 0; i < yd.size(); ++i) v *= bases[i](yd[i], xd[i]);
  return v;
}

double brute_force_dual(const DenseTable& table, const std::vector<LocalBasis>& bases, std::size_t y) {
  const auto yd = table.spec.unpack(y);
  double sum = 0.0;
  for (std::size_t x = 0; x < table.size(); ++x) {
    const auto xd = table.spec.unpack(x);
    double phi = 1.0;
    for (std::size_t i = 0; i < yd.size(); ++i) phi *= bases[i](yd[i], xd[i]);
    sum += table.values[x] * phi;
  }
  return sum;
}

}  // namespace fsll
