#include <set>
#include <sstream>

#include "doctest.h"
#include "fsll/cost.hpp"
#include "fsll/errors.hpp"
#include "fsll/generators.hpp"
#include "support.hpp"

using namespace fsll;

TEST_CASE("Ising examples") {
  const auto two = ising_true_distribution(IsingGridSpec{1, 2, 0.5});
  const double a = std::exp(0.5), b = std::exp(-0.5), z = 2 * a + 2 * b;
  CHECK(two[0] == doctest::Approx(a / z).epsilon(1e-15));
  CHECK(two[1] == doctest::Approx(b / z).epsilon(1e-15));
  CHECK(two[2] == doctest::Approx(b / z).epsilon(1e-15));
  CHECK(two[3] == doctest::Approx(a / z).epsilon(1e-15));

  for (auto [r, c] : {std::pair{2, 3}, {3, 3}, {1, 5}}) {
    const auto p = ising_true_distribution(IsingGridSpec{r, c, 0.5});
    const std::size_t all = p.size() - 1;
    for (std::size_t x = 0; x < p.size(); ++x) REQUIRE(p[x] == doctest::Approx(p[all ^ x]).epsilon(1e-14));
  }

  const auto big = ising_true_distribution(IsingGridSpec{5, 4, 0.5});
  CHECK(big.size() == std::size_t{1} << 20);
  CHECK(is_distribution(big.values, 1e-12));
  double h = 0.0;
  for (double v : big.values) h -= v * std::log(v);
  CHECK(h < 20 * std::log(2.0));
  CHECK_THROWS_AS(ising_true_distribution(IsingGridSpec{6, 5, 0.5}), CapacityError);
}

TEST_CASE("Ising grid adjacency is 4-neighbour and non-periodic") {
  const IsingGridSpec g{3, 4, 0.5};
  const auto e = g.edges();
  CHECK(e.size() == static_cast<std::size_t>(3 * 3 + 2 * 4));
  std::set<std::pair<int, int>> set(e.begin(), e.end());
  CHECK(set.count({0, 1}));
  CHECK(set.count({0, 4}));
  CHECK_FALSE(set.count({3, 4}));
  CHECK_FALSE(set.count({0, 3}));
}

TEST_CASE("Ising density equals a direct evaluation") {
  const IsingGridSpec g{2, 3, 0.7};
  const auto p = ising_true_distribution(g);
  std::vector<double> w(p.size());
  double z = 0.0;
  for (std::size_t x = 0; x < p.size(); ++x) {
    double e = 0.0;
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 3; ++c) {
        const int i = r * 3 + c;
        const double si = (x >> i & 1) ? 1 : -1;
        if (c + 1 < 3) e += si * ((x >> (i + 1) & 1) ? 1 : -1);
        if (r + 1 < 2) e += si * ((x >> (i + 3) & 1) ? 1 : -1);
      }
    z += (w[x] = std::exp(0.7 * e));
  }
  for (std::size_t x = 0; x < p.size(); ++x) CHECK(p[x] == doctest::Approx(w[x] / z).epsilon(1e-13));
}

TEST_CASE("Bayes net schedules") {
  const auto two = random_bayes_net(20, 2, 1);
  const auto three = random_bayes_net(20, 3, 1);
  CHECK(two.edge_count() == 37);
  CHECK(three.edge_count() == 54);
  CHECK(random_bayes_net(12, 2, 3).edge_count() == 21);
  CHECK(random_bayes_net(12, 3, 3).edge_count() == 30);
  CHECK(random_bayes_net(20, 3, 9) == random_bayes_net(20, 3, 9));
  CHECK_FALSE(random_bayes_net(20, 3, 9) == random_bayes_net(20, 3, 10));
  CHECK(three.parents[0].empty());
  CHECK(three.parents[1] == std::vector<int>{0});
  CHECK(three.parents[2] == std::vector<int>{0, 1});
  for (int i = 0; i < 20; ++i) {
    for (int q : three.parents[i]) CHECK(q < i);
    CHECK(three.cpts[i].size() == (std::size_t{2} << three.parents[i].size()));
    for (std::size_t k = 0; k < three.cpts[i].size(); k += 2) {
      CHECK(three.cpts[i][k] + three.cpts[i][k + 1] == doctest::Approx(1.0).epsilon(1e-15));
      CHECK(three.cpts[i][k] >= 1e-3 / (1 + 2e-3));
    }
  }
  CHECK_THROWS_AS(random_bayes_net(3, 3, 0), DomainError);
  CHECK_THROWS_AS(random_bayes_net(5, 1, 0), DomainError);
}

TEST_CASE("parents are drawn roughly uniformly") {
  std::vector<int> hits(9, 0);
  const int nets = 3000;
  for (int s = 0; s < nets; ++s) {
    const auto net = random_bayes_net(10, 2, static_cast<std::uint64_t>(s));
    for (int q : net.parents[9]) ++hits[q];
  }
  for (int q = 0; q < 9; ++q) CHECK(std::abs(hits[q] / double(nets) - 2.0 / 9.0) < 0.03);
}

TEST_CASE("Bayes net density examples") {
  BayesNetSpec flat;
  flat.n = 3;
  flat.parents = {{}, {}, {}};
  flat.cpts = {{0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}};
  for (double v : bn_true_distribution(flat).values) CHECK(v == 0.125);

  BayesNetSpec copy;
  copy.n = 2;
  copy.parents = {{}, {0}};
  copy.cpts = {{0.3, 0.7}, {1.0, 0.0, 0.0, 1.0}};
  const auto p = bn_true_distribution(copy);
  CHECK(p[0] == doctest::Approx(0.3));
  CHECK(p[1] == 0.0);
  CHECK(p[2] == 0.0);
  CHECK(p[3] == doctest::Approx(0.7));
}

TEST_CASE("conditionals recovered from the joint equal the tables") {
  const auto net = random_bayes_net(8, 3, 21);
  const auto p = bn_true_distribution(net);
  CHECK(is_distribution(p.values, 1e-12));
  for (double v : p.values) CHECK(v > 0.0);
  for (int i = 0; i < net.n; ++i) {
    const auto& pa = net.parents[i];
    std::vector<double> joint(std::size_t{2} << pa.size(), 0.0);
    for (std::size_t x = 0; x < p.size(); ++x) {
      std::size_t cfg = 0;
      for (std::size_t k = 0; k < pa.size(); ++k) cfg |= (x >> pa[k] & 1) << k;
      joint[2 * cfg + (x >> i & 1)] += p[x];
    }
    for (std::size_t cfg = 0; cfg < joint.size() / 2; ++cfg) {
      const double m = joint[2 * cfg] + joint[2 * cfg + 1];
      REQUIRE(joint[2 * cfg] / m == doctest::Approx(net.cpts[i][2 * cfg]).epsilon(1e-12));
    }
  }
}

TEST_CASE("sampling examples") {
  const VariableSpec spec({2, 3});
  DenseTable point(spec, TableKind::distribution);
  point.values[4] = 1.0;
  const auto d = sample(point, 500, 3);
  for (std::size_t r = 0; r < d.rows(); ++r) REQUIRE(d.flat(r) == 4);

  const auto coin = sample(DenseTable::uniform(VariableSpec({2})), 1000000, 11);
  std::size_t heads = 0;
  for (auto f : coin.flat_rows()) heads += f;
  CHECK(heads / 1e6 >= 0.498);
  CHECK(heads / 1e6 <= 0.502);

  testkit::Gen g(12);
  const auto p = g.distribution(VariableSpec({3, 3, 2}));
  CHECK(sample(p, 1000, 5) == sample(p, 1000, 5));
  CHECK_FALSE(sample(p, 1000, 5) == sample(p, 1000, 6));
}

TEST_CASE("empirical distributions approach the truth as N doubles") {
  const auto truth = ising_true_distribution(IsingGridSpec{2, 3, 0.5});
  double prev = std::numeric_limits<double>::infinity();
  for (std::uint64_t n = 1000; n <= 128000; n *= 4) {
    auto emp = empirical_distribution(sample(truth, n, 3));
    for (auto& v : emp.values) v = (v * n + 0.5) / (n + 0.5 * emp.size());
    const double d = kl(truth, emp);
    CHECK(d < prev);
    prev = d;
  }
}

TEST_CASE("truth files round trip") {
  std::vector<TruthSpec> truths{IsingGridSpec{5, 4, 0.5}, random_bayes_net(10, 3, 4),
                                TableTruth{DenseTable(VariableSpec({3, 2}), {0.1, 0.2, 0.3, 0.1, 0.2, 0.1},
                                                      TableKind::distribution)}};
  for (const auto& t : truths) {
    std::stringstream ss;
    write_truth(ss, t);
    CHECK(ss.str().rfind("# fsll truth\n", 0) == 0);
    std::istringstream in(ss.str());
    const auto back = read_truth(in);
    CHECK(back.index() == t.index());
    CHECK(truth_distribution(back).values == truth_distribution(t).values);
  }
  std::istringstream bad("# fsll truth\nfamily: moebius\n");
  CHECK_THROWS_AS(read_truth(bad), IoError);
}
