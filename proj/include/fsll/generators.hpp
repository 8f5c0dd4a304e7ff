#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "fsll/core.hpp"

namespace fsll {

/// rows x cols binary spins s_i = 2 x_i - 1 on a non-periodic 4-neighbour
/// grid; variable index of cell (r, c) is r * cols + c.
struct IsingGridSpec {
  int rows = 0;
  int cols = 0;
  double coupling = 0.5;

  int variables() const { return rows * cols; }
  std::vector<std::pair<int, int>> edges() const;
  friend bool operator==(const IsingGridSpec&, const IsingGridSpec&) = default;
};

/// p(x) proportional to exp(coupling * sum_<i,j> s_i s_j).
DenseTable ising_true_distribution(const IsingGridSpec& spec);

/// Binary Bayesian network with parents strictly lower-indexed.
/// cpts[i][2 * cfg + v] = p(x_i = v | parents = cfg), cfg bit k = value of parents[i][k].
struct BayesNetSpec {
  int n = 0;
  int max_parents = 0;
  std::uint64_t seed = 0;
  std::vector<std::vector<int>> parents;
  std::vector<std::vector<double>> cpts;

  int edge_count() const;
  void validate() const;
  friend bool operator==(const BayesNetSpec&, const BayesNetSpec&) = default;
};

/// Node i gets min(i, max_parents) parents drawn uniformly without
/// replacement from 0..i-1. Each CPT row is Dirichlet(1) with a 1e-3 floor.
BayesNetSpec random_bayes_net(int n, int max_parents, std::uint64_t seed);

DenseTable bn_true_distribution(const BayesNetSpec& spec);

/// N i.i.d. draws by inverse CDF over the flat index; draw k uses counter k
/// of the stream keyed by seed.
Dataset sample(const DenseTable& dist, std::uint64_t count, std::uint64_t seed);

/// Dense explicit target.
struct TableTruth {
  DenseTable table;
};

/// A true distribution together with how it was built.
using TruthSpec = std::variant<IsingGridSpec, BayesNetSpec, TableTruth>;

DenseTable truth_distribution(const TruthSpec& truth);

// Truth file: "# fsll truth" then "key: value" lines; Bayes nets add one
// "node <i> parents <a,b|-> cpt <p,p,...>" record per node.
void write_truth(std::ostream& out, const TruthSpec& truth);
TruthSpec read_truth(std::istream& in);
void save_truth(const std::string& path, const TruthSpec& truth);
TruthSpec load_truth(const std::string& path);

}  // namespace fsll
