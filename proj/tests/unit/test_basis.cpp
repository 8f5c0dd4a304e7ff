#include "doctest.h"
#include "fsll/basis.hpp"
#include "fsll/errors.hpp"
#include "support.hpp"

using namespace fsll;

namespace {

std::vector<double> rows_of(std::initializer_list<std::initializer_list<double>> m) {
  std::vector<double> out;
  for (auto r : m) out.insert(out.end(), r.begin(), r.end());
  return out;
}

// Rank by Gaussian elimination with partial pivoting.
int rank_of(std::vector<double> a, int rows, int cols) {
  int rank = 0;
  for (int c = 0; c < cols && rank < rows; ++c) {
    int piv = rank;
    for (int r = rank + 1; r < rows; ++r)
      if (std::abs(a[r * cols + c]) > std::abs(a[piv * cols + c])) piv = r;
    if (std::abs(a[piv * cols + c]) < 1e-9) continue;
    for (int k = 0; k < cols; ++k) std::swap(a[rank * cols + k], a[piv * cols + k]);
    for (int r = rank + 1; r < rows; ++r) {
      const double f = a[r * cols + c] / a[rank * cols + c];
      for (int k = c; k < cols; ++k) a[r * cols + k] -= f * a[rank * cols + k];
    }
    ++rank;
  }
  return rank;
}

}  // namespace

TEST_CASE("local basis examples") {
  CHECK(local_basis(2).matrix == rows_of({{1, 1}, {1, -1}}));
  CHECK(local_basis(3).matrix == rows_of({{1, 1, 1}, {-1, 1, -1}, {-1, -1, 1}}));
  const auto h4 = local_basis(4);
  CHECK(h4.is_wht);
  CHECK(h4.matrix == rows_of({{1, 1, 1, 1}, {1, -1, 1, -1}, {1, 1, -1, -1}, {1, -1, -1, 1}}));
  CHECK_FALSE(local_basis(3).is_wht);
  CHECK_THROWS_AS(local_basis(1), DomainError);
}

TEST_CASE("local bases are +-1 with unit first row and full rank") {
  for (int card = 2; card <= 40; ++card) {
    const auto b = local_basis(card);
    CHECK(b.is_wht == std::has_single_bit(static_cast<unsigned>(card)));
    for (int j = 0; j < card; ++j)
      for (int x = 0; x < card; ++x) {
        REQUIRE(b(j, x) == testkit::phi(card, j, x));
        if (j == 0) REQUIRE(b(j, x) == 1.0);
      }
    if (card <= 16) CHECK(rank_of(b.matrix, card, card) == card);
  }
}

TEST_CASE("products of two local bases are linearly independent") {
  for (int a = 2; a <= 6; ++a)
    for (int b = 2; b <= 6; ++b) {
      const auto ba = local_basis(a), bb = local_basis(b);
      const int m = a * b;
      std::vector<double> k(static_cast<std::size_t>(m * m));
      for (int ja = 0; ja < a; ++ja)
        for (int jb = 0; jb < b; ++jb)
          for (int xa = 0; xa < a; ++xa)
            for (int xb = 0; xb < b; ++xb) k[(ja * b + jb) * m + xa * b + xb] = ba(ja, xa) * bb(jb, xb);
      CHECK_MESSAGE(rank_of(k, m, m) == m, "cards " << a << "," << b);
    }
}

TEST_CASE("fast WHT examples") {
  std::vector<double> one{1};
  fast_wht_inplace(one);
  CHECK(one == std::vector<double>{1});
  std::vector<double> two{1, 0};
  fast_wht_inplace(two);
  CHECK(two == std::vector<double>{1, 1});
  const double a = 0.3, b = -1.2, c = 2.5, d = 7.0;
  std::vector<double> four{a, b, c, d};
  fast_wht_inplace(four);
  CHECK(four == std::vector<double>{a + b + c + d, a - b + c - d, a + b - c - d, a - b - c + d});
  std::vector<double> three{1, 2, 3};
  CHECK_THROWS_AS(fast_wht_inplace(three), DomainError);
}

TEST_CASE("fast WHT matches the explicit matrix") {
  testkit::Gen g(21);
  for (int k = 0; k <= 9; ++k) {
    const int m = 1 << k;
    std::vector<double> v(m);
    for (auto& x : v) x = g.uniform(-1, 1);
    auto w = v;
    fast_wht_inplace(w);
    for (int j = 0; j < m; ++j) {
      double s = 0.0;
      for (int x = 0; x < m; ++x) s += testkit::phi(m, j, x) * v[x];
      REQUIRE(w[j] == doctest::Approx(s).epsilon(1e-12));
    }
  }
}

TEST_CASE("local transform pass examples") {
  const VariableSpec one({2});
  const DenseTable p(one, {0.7, 0.3}, TableKind::distribution);
  const auto out = local_transform_pass(p, 0, local_basis(2));
  CHECK(out[0] == doctest::Approx(1.0));
  CHECK(out[1] == doctest::Approx(0.4));

  const VariableSpec spec({3, 2, 4});
  const auto u = DenseTable::uniform(spec);
  const auto g0 = local_transform_pass(u, 0, local_basis(3));
  for (std::size_t x = 0; x < spec.size(); ++x) {
    if (spec.digit(x, 0) == 0)
      CHECK(g0[x] == doctest::Approx(3.0 / 24.0));
    else
      CHECK(g0[x] == doctest::Approx(-1.0 / 24.0));
  }
  CHECK_THROWS_AS(local_transform_pass(u, 3, local_basis(4)), DomainError);
  CHECK_THROWS_AS(local_transform_pass(u, 0, local_basis(2)), DomainError);
}

TEST_CASE("dual transform examples") {
  testkit::Gen g(4);
  // Row j > 0 of a non-power-of-two basis sums to 2 - card and has phi_j(0) = -1.
  for (const auto& cards : {std::vector<int>{2, 2, 2}, {3, 5}, {2, 3, 4, 2}, {64}, {32, 3}, {4, 8}}) {
    const VariableSpec spec(cards);
    const auto bases = make_bases(spec);
    const auto u = dual_transform(DenseTable::uniform(spec), bases);
    DenseTable point(spec, TableKind::distribution);
    point.values[0] = 1.0;
    const auto pt = dual_transform(point, bases);
    CHECK(u[0] == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t y = 0; y < spec.size(); ++y) {
      double uniform_entry = 1.0, point_entry = 1.0;
      for (int i = 0; i < spec.n(); ++i) {
        const int c = spec.card(i);
        if (spec.digit(y, i) == 0) continue;
        if (std::has_single_bit(static_cast<unsigned>(c))) {
          uniform_entry = 0.0;
        } else {
          uniform_entry *= (2.0 - c) / c;
          point_entry = -point_entry;
        }
      }
      REQUIRE(std::abs(u[y] - uniform_entry) < 1e-12);
      REQUIRE(pt[y] == point_entry);
    }
    if (spec.all_binary() || cards == std::vector<int>{4, 8} || cards == std::vector<int>{64}) {
      for (std::size_t y = 1; y < spec.size(); ++y) REQUIRE(std::abs(u[y]) < 1e-12);
      for (std::size_t y = 0; y < spec.size(); ++y) REQUIRE(pt[y] == 1.0);
    }
  }
  const VariableSpec spec({2, 3, 2});
  const auto bases = make_bases(spec);
  const auto p = g.distribution(spec);
  const auto before = p.values;
  const auto dual = dual_transform(p, bases);
  CHECK(p.values == before);
  for (std::size_t y = 0; y < spec.size(); ++y) {
    CHECK(std::abs(dual[y] - brute_force_dual(p, bases, y)) < 1e-12);
    CHECK(std::abs(dual[y] - testkit::dual_entry(p.values, spec, y)) < 1e-12);
  }
  CHECK_THROWS_AS(dual_transform(p, make_bases(VariableSpec({2, 3}))), DomainError);
}

TEST_CASE("brute force dual examples") {
  const VariableSpec spec({3, 2});
  const auto bases = make_bases(spec);
  CHECK(brute_force_dual(DenseTable::uniform(spec), bases, 0) == doctest::Approx(1.0));
  const VariableSpec bin({4, 2});
  const auto bin_bases = make_bases(bin);
  DenseTable point(bin, TableKind::distribution);
  point.values[0] = 1.0;
  for (std::size_t y = 0; y < bin.size(); ++y) CHECK(brute_force_dual(point, bin_bases, y) == 1.0);
  DenseTable any(spec, {1, 2, 3, 4, 5, 6}, TableKind::coefficients);
  CHECK(brute_force_dual(any, bases, 0) == 21.0);
}

TEST_CASE("dual transform agrees with brute force on random mixed specs") {
  testkit::Gen g(8);
  for (int trial = 0; trial < 60; ++trial) {
    const auto spec = g.spec(trial % 3 == 0 ? 40 : 6, std::size_t{1} << 11);
    const auto bases = make_bases(spec);
    const auto p = g.distribution(spec);
    const auto dual = dual_transform(p, bases);
    CHECK(std::abs(dual[0] - 1.0) < 1e-12);
    for (std::size_t y = 0; y < spec.size(); ++y) {
      REQUIRE(std::abs(dual[y] - brute_force_dual(p, bases, y)) < 1e-10);
      REQUIRE(std::abs(dual[y]) <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("composing local passes equals the dual transform") {
  const VariableSpec spec({4, 3, 2});
  const auto bases = make_bases(spec);
  testkit::Gen g(2);
  auto t = g.distribution(spec);
  const auto dual = dual_transform(t, bases);
  for (int i = 0; i < spec.n(); ++i) t = local_transform_pass(t, i, bases[i]);
  for (std::size_t y = 0; y < spec.size(); ++y) CHECK(t[y] == doctest::Approx(dual[y]).epsilon(1e-13));
}

TEST_CASE("transform applied twice on binary specs scales by |X|") {
  testkit::Gen g(12);
  for (int n = 1; n <= 10; ++n) {
    const auto spec = VariableSpec::binary(n);
    const auto bases = make_bases(spec);
    const auto p = g.distribution(spec);
    std::vector<double> v = p.values;
    dual_transform_inplace(v, spec, bases);
    dual_transform_inplace(v, spec, bases);
    for (std::size_t x = 0; x < spec.size(); ++x)
      REQUIRE(v[x] == doctest::Approx(static_cast<double>(spec.size()) * p[x]).epsilon(1e-12));
  }
}

TEST_CASE("WHT path and direct path agree for large power-of-two cards") {
  const VariableSpec spec({2, 64, 3});
  const auto bases = make_bases(spec);
  testkit::Gen g(31);
  const auto p = g.distribution(spec);
  const auto dual = dual_transform(p, bases);
  for (std::size_t y = 0; y < spec.size(); y += 7) REQUIRE(std::abs(dual[y] - brute_force_dual(p, bases, y)) < 1e-12);
}

TEST_CASE("basis sign enumeration matches the product rule") {
  testkit::Gen g(17);
  for (int trial = 0; trial < 20; ++trial) {
    const auto spec = g.spec(5, 300);
    const auto bases = make_bases(spec);
    const std::size_t y = g.rng.below(spec.size());
    std::size_t expect = 0;
    for_each_basis_sign(spec, bases, y, [&](std::size_t x, double sign) {
      REQUIRE(x == expect++);
      REQUIRE(sign == testkit::Phi(spec, y, x));
      REQUIRE(sign == basis_value(spec, bases, y, x));
    });
    CHECK(expect == spec.size());
  }
}
