#include <sstream>

#include "doctest.h"
#include "fsll/errors.hpp"
#include "fsll/model.hpp"
#include "support.hpp"

using namespace fsll;

TEST_CASE("sparse theta never stores y = 0 or zero values") {
  SparseTheta t;
  CHECK_THROWS_AS(t.set(0, 1.0), DomainError);
  t.set(3, 0.5);
  CHECK(t.contains(3));
  CHECK(t.get(3) == 0.5);
  t.set(3, 0.0);
  CHECK_FALSE(t.contains(3));
  CHECK(t.empty());
  CHECK(t.get(9) == 0.0);
}

TEST_CASE("init model examples") {
  const auto m = init_model(VariableSpec({2, 2}));
  CHECK(m.theta.size() == 0);
  CHECK(m.p.values == std::vector<double>(4, 0.25));
  const auto m3 = init_model(VariableSpec({3}));
  for (double v : m3.p.values) CHECK(v == doctest::Approx(1.0 / 3.0));
  testkit::Gen g(1);
  for (int i = 0; i < 10; ++i) {
    const auto s = init_model(g.spec(5, 500));
    CHECK(recompute_density(s).values == s.p.values);
  }
}

TEST_CASE("log unnormalized examples") {
  auto m = init_model(VariableSpec({2, 2}));
  for (std::size_t x = 0; x < 4; ++x) CHECK(log_unnormalized(m, x) == 0.0);
  const double a = 0.37;
  m = make_model(VariableSpec({2, 2}), [&] {
    SparseTheta t;
    t.set(1, a);
    return t;
  }());
  for (std::size_t x = 0; x < 4; ++x) CHECK(log_unnormalized(m, x) == (m.spec.digit(x, 0) == 0 ? a : -a));

  testkit::Gen g(7);
  for (int trial = 0; trial < 20; ++trial) {
    const auto spec = g.spec(5, 400);
    const auto state = make_model(spec, g.theta(spec, 5, 1.0));
    for (std::size_t x = 0; x < spec.size(); ++x) {
      double dense = 0.0;
      for (std::size_t y = 1; y < spec.size(); ++y) dense += state.theta.get(y) * testkit::Phi(spec, y, x);
      REQUIRE(std::abs(log_unnormalized(state, x) - dense) < 1e-12);
    }
  }
}

TEST_CASE("recompute density examples") {
  const VariableSpec spec({2, 3});
  CHECK(recompute_density(init_model(spec)).values == DenseTable::uniform(spec).values);
  SparseTheta t;
  t.set(1, std::atanh(0.5));
  const auto m = make_model(VariableSpec({2}), t);
  CHECK(m.p[0] - m.p[1] == doctest::Approx(0.5).epsilon(1e-14));

  testkit::Gen g(44);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = g.spec(4, 300);
    const auto theta = g.theta(s, 6, 2.0);
    const auto model = make_model(s, theta);
    CHECK(testkit::max_abs_diff(model.p.values, testkit::density(s, theta)) < 1e-13);
  }
  // Large parameters stay finite.
  SparseTheta big;
  big.set(1, 800.0);
  const auto huge = make_model(VariableSpec({2, 2}), big);
  CHECK(is_distribution(huge.p.values));
}

TEST_CASE("apply update examples") {
  auto m = init_model(VariableSpec({2}));
  apply_update(m, 1, std::atanh(0.6));
  CHECK(m.p[0] == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(m.p[1] == doctest::Approx(0.2).epsilon(1e-14));

  testkit::Gen g(3);
  const VariableSpec spec({3, 2, 2});
  auto s = make_model(spec, g.theta(spec, 4, 1.0));
  const auto before = s.p.values;
  const std::size_t y = s.theta.begin()->first;
  apply_update(s, y, s.theta.get(y));
  CHECK(testkit::max_abs_diff(before, s.p.values) <= 1e-15);
  CHECK_THROWS_AS(apply_update(s, 0, 1.0), DomainError);
}

TEST_CASE("random update trajectories match recomputation") {
  testkit::Gen g(99);
  for (int trial = 0; trial < 15; ++trial) {
    const auto spec = g.spec(4, 512);
    auto state = init_model(spec);
    for (int step = 0; step < 20; ++step) {
      const std::size_t y = 1 + g.rng.below(spec.size() - 1);
      const double value = g.rng.uniform() < 0.2 ? 0.0 : g.uniform(-1.5, 1.5);
      apply_update(state, y, value);
      double sum = 0.0;
      for (double v : state.p.values) sum += v;
      REQUIRE(std::abs(sum - 1.0) < 1e-12);
    }
    CHECK(testkit::max_abs_diff(state.p.values, recompute_density(state).values) < 1e-10);
    CHECK(testkit::max_abs_diff(state.p.values, testkit::density(spec, state.theta)) < 1e-10);
  }
}

TEST_CASE("finite-difference derivative of ln Z is the dual parameter") {
  testkit::Gen g(61);
  const double h = 1e-5;
  for (int trial = 0; trial < 10; ++trial) {
    const auto spec = g.spec(4, 64);
    const auto theta = g.theta(spec, 3, 0.8);
    const auto model = make_model(spec, theta);
    const auto dual = dual_transform(model.p, model.bases);
    for (int k = 0; k < 4; ++k) {
      const std::size_t y = 1 + g.rng.below(spec.size() - 1);
      auto plus = theta, minus = theta;
      plus.set(y, theta.get(y) + h);
      minus.set(y, theta.get(y) - h);
      const double fd = (testkit::log_z(spec, plus) - testkit::log_z(spec, minus)) / (2 * h);
      REQUIRE(std::abs(fd - dual[y]) < 1e-6);
    }
  }
}

TEST_CASE("dual parameter moves along an axis by the tanh law") {
  testkit::Gen g(62);
  for (int trial = 0; trial < 10; ++trial) {
    const VariableSpec spec = VariableSpec::binary(g.integer(2, 6));
    auto state = make_model(spec, g.theta(spec, 4, 0.7));
    const std::size_t y = 1 + g.rng.below(spec.size() - 1);
    const double start = state.theta.get(y);
    const double tb0 = dual_transform(state.p, state.bases)[y];
    for (double step : {-1.3, -0.2, 0.4, 2.0}) {
      apply_update(state, y, start + step);
      const double measured = dual_transform(state.p, state.bases)[y];
      REQUIRE(std::abs(measured - std::tanh(step + std::atanh(tb0))) < 1e-9);
    }
  }
}

TEST_CASE("model file round trip is bit-exact") {
  testkit::Gen g(5);
  const VariableSpec spec({2, 3, 4});
  const auto m = make_model(spec, g.theta(spec, 7, 3.0));
  std::stringstream ss;
  write_model(ss, m);
  std::istringstream in(ss.str());
  const auto back = read_model(in);
  CHECK(back.spec == spec);
  CHECK(back.theta == m.theta);
  CHECK(back.p.values == m.p.values);

  auto parse = [](const std::string& s) {
    std::istringstream in(s);
    return read_model(in);
  };
  CHECK_THROWS_AS(parse("# cards: 2,2\n0,0,1.5\n"), IoError);
  CHECK_THROWS_AS(parse("# cards: 2,2\n1,0,1.5\n1,0,2\n"), IoError);
  CHECK_THROWS(parse("# cards: 2,2\n2,0,1.5\n"));
  CHECK_THROWS_AS(parse("cards 2,2\n"), IoError);
}
