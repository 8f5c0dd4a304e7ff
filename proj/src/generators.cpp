#include "fsll/generators.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "fsll/bm.hpp"
#include "fsll/errors.hpp"
#include "fsll/rng.hpp"

namespace fsll {

namespace {

constexpr double kCptFloor = 1e-3;
constexpr const char* kTruthHeader = "# fsll truth";

void check_enumerable(int n) {
  if (n < 1) throw DomainError("generator needs at least one variable");
  if (n > kMaxBmVars) throw CapacityError("true distribution with " + std::to_string(n) + " variables is too large");
}

void normalize(std::vector<double>& v) {
  double z = 0.0;
  for (double x : v) z += x;
  for (double& x : v) x /= z;
}

std::string join_reals(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += detail::format_real(v[i]);
  }
  return s;
}

std::vector<double> parse_real_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& tok : detail::split(text, ',')) out.push_back(detail::parse_real(tok));
  return out;
}

}  // namespace

std::vector<std::pair<int, int>> IsingGridSpec::edges() const {
  std::vector<std::pair<int, int>> e;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      const int i = r * cols + c;
      if (c + 1 < cols) e.emplace_back(i, i + 1);
      if (r + 1 < rows) e.emplace_back(i, i + cols);
    }
  return e;
}

DenseTable ising_true_distribution(const IsingGridSpec& spec) {
  if (spec.rows < 1 || spec.cols < 1) throw DomainError("Ising grid needs positive rows and cols");
  check_enumerable(spec.variables());
  const auto edges = spec.edges();
  const VariableSpec vs = VariableSpec::binary(spec.variables());
  std::vector<double> l(vs.size());
  for (std::size_t x = 0; x < vs.size(); ++x) {
    int agree = 0;
    for (const auto& [i, j] : edges) agree += (((x >> i) ^ (x >> j)) & 1U) ? -1 : 1;
    l[x] = spec.coupling * agree;
  }
  const double top = *std::max_element(l.begin(), l.end());
  for (double& v : l) v = std::exp(v - top);
  normalize(l);
  return DenseTable(vs, std::move(l), TableKind::distribution);
}

int BayesNetSpec::edge_count() const {
  int e = 0;
  for (const auto& p : parents) e += static_cast<int>(p.size());
  return e;
}

void BayesNetSpec::validate() const {
  check_enumerable(n);
  if (parents.size() != static_cast<std::size_t>(n) || cpts.size() != static_cast<std::size_t>(n)) {
    throw DomainError("Bayes net needs parents and CPT for every node");
  }
  for (int i = 0; i < n; ++i) {
    const auto& ps = parents[static_cast<std::size_t>(i)];
    for (int p : ps)
      if (p < 0 || p >= i) throw DomainError("parent of node " + std::to_string(i) + " must have a lower index");
    const auto& cpt = cpts[static_cast<std::size_t>(i)];
    if (cpt.size() != (std::size_t{2} << ps.size())) throw DomainError("CPT size mismatch at node " + std::to_string(i));
    for (std::size_t row = 0; row < cpt.size(); row += 2) {
      if (!(cpt[row] >= 0.0 && cpt[row + 1] >= 0.0) || std::abs(cpt[row] + cpt[row + 1] - 1.0) > 1e-12) {
        throw DomainError("CPT row of node " + std::to_string(i) + " is not a distribution");
      }
    }
  }
}

BayesNetSpec random_bayes_net(int n, int max_parents, std::uint64_t seed) {
  if (max_parents != 2 && max_parents != 3) throw DomainError("parent schedule must be 2 or 3 parents");
  if (n < max_parents + 1) {
    throw DomainError("a " + std::to_string(max_parents) + "-parent schedule needs at least " +
                      std::to_string(max_parents + 1) + " nodes");
  }
  check_enumerable(n);
  BayesNetSpec spec;
  spec.n = n;
  spec.max_parents = max_parents;
  spec.seed = seed;
  CounterRng structure(seed, 1);
  CounterRng tables(seed, 2);
  for (int i = 0; i < n; ++i) {
    std::vector<int> pool(static_cast<std::size_t>(i));
    for (int k = 0; k < i; ++k) pool[static_cast<std::size_t>(k)] = k;
    const int count = std::min(i, max_parents);
    // partial Fisher-Yates
    for (int k = 0; k < count; ++k) {
      const auto pick = static_cast<std::size_t>(k) + structure.below(static_cast<std::uint64_t>(i - k));
      std::swap(pool[static_cast<std::size_t>(k)], pool[pick]);
    }
    std::vector<int> ps(pool.begin(), pool.begin() + count);
    std::sort(ps.begin(), ps.end());
    std::vector<double> cpt;
    for (std::size_t cfg = 0; cfg < (std::size_t{1} << ps.size()); ++cfg) {
      // Dirichlet(1, 1) as normalized unit exponentials, then floored.
      std::vector<double> row{-std::log1p(-tables.uniform()), -std::log1p(-tables.uniform())};
      normalize(row);
      for (double& v : row) v = std::max(v, kCptFloor);
      normalize(row);
      cpt.insert(cpt.end(), row.begin(), row.end());
    }
    spec.parents.push_back(std::move(ps));
    spec.cpts.push_back(std::move(cpt));
  }
  return spec;
}

DenseTable bn_true_distribution(const BayesNetSpec& spec) {
  spec.validate();
  const VariableSpec vs = VariableSpec::binary(spec.n);
  std::vector<double> p(vs.size(), 1.0);
  for (std::size_t x = 0; x < vs.size(); ++x) {
    double prob = 1.0;
    for (int i = 0; i < spec.n; ++i) {
      const auto& ps = spec.parents[static_cast<std::size_t>(i)];
      std::size_t cfg = 0;
      for (std::size_t k = 0; k < ps.size(); ++k) cfg |= ((x >> ps[k]) & 1U) << k;
      prob *= spec.cpts[static_cast<std::size_t>(i)][2 * cfg + ((x >> i) & 1U)];
    }
    p[x] = prob;
  }
  return DenseTable(vs, std::move(p), TableKind::distribution);
}

Dataset sample(const DenseTable& dist, std::uint64_t count, std::uint64_t seed) {
  if (count < 1) throw DomainError("sample count must be >= 1");
  if (!is_distribution(dist.view(), 1e-9)) throw DomainError("sampling needs a distribution");
  std::vector<double> cdf(dist.size());
  double acc = 0.0;
  for (std::size_t x = 0; x < dist.size(); ++x) {
    acc += dist.values[x];
    cdf[x] = acc;
  }
  CounterRng rng(seed, 0);
  std::vector<std::size_t> rows(count);
  for (auto& r : rows) {
    const double u = rng.uniform() * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) --it;
    // skip zero-probability entries that share the cumulative value
    while (dist.values[static_cast<std::size_t>(it - cdf.begin())] == 0.0 && it != cdf.begin()) --it;
    r = static_cast<std::size_t>(it - cdf.begin());
  }
  return Dataset(dist.spec, std::move(rows));
}

DenseTable truth_distribution(const TruthSpec& truth) {
  struct Visitor {
    DenseTable operator()(const IsingGridSpec& s) const { return ising_true_distribution(s); }
    DenseTable operator()(const BayesNetSpec& s) const { return bn_true_distribution(s); }
    DenseTable operator()(const TableTruth& t) const {
      if (!is_distribution(t.table.view(), 1e-9)) throw DomainError("truth table is not a distribution");
      return t.table;
    }
  };
  return std::visit(Visitor{}, truth);
}

void write_truth(std::ostream& out, const TruthSpec& truth) {
  out << kTruthHeader << '\n';
  if (const auto* ising = std::get_if<IsingGridSpec>(&truth)) {
    out << "family: ising\n"
        << "rows: " << ising->rows << '\n'
        << "cols: " << ising->cols << '\n'
        << "coupling: " << detail::format_real(ising->coupling) << '\n';
  } else if (const auto* bn = std::get_if<BayesNetSpec>(&truth)) {
    out << "family: bayes-net\n"
        << "nodes: " << bn->n << '\n'
        << "max_parents: " << bn->max_parents << '\n'
        << "seed: " << bn->seed << '\n'
        << "edges: " << bn->edge_count() << '\n';
    for (int i = 0; i < bn->n; ++i) {
      const auto& ps = bn->parents[static_cast<std::size_t>(i)];
      std::string plist = "-";
      if (!ps.empty()) {
        plist.clear();
        for (std::size_t k = 0; k < ps.size(); ++k) plist += (k ? "," : "") + std::to_string(ps[k]);
      }
      out << "node " << i << " parents " << plist << " cpt " << join_reals(bn->cpts[static_cast<std::size_t>(i)])
          << '\n';
    }
  } else {
    const auto& t = std::get<TableTruth>(truth).table;
    out << "family: table\n"
        << "cards: " << t.spec.to_string() << '\n'
        << "values: " << join_reals(t.values) << '\n';
  }
}

TruthSpec read_truth(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || detail::trim(line) != kTruthHeader) throw IoError("truth file must start with '# fsll truth'");
  std::map<std::string, std::string> keys;
  BayesNetSpec bn;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t.rfind("node ", 0) == 0) {
      std::istringstream ss(t);
      std::string kw_node, kw_parents, plist, kw_cpt, cpt;
      int idx = -1;
      if (!(ss >> kw_node >> idx >> kw_parents >> plist >> kw_cpt >> cpt) || kw_parents != "parents" || kw_cpt != "cpt" ||
          idx != static_cast<int>(bn.parents.size())) {
        throw IoError("truth line " + std::to_string(lineno) + ": malformed node record");
      }
      bn.parents.push_back(plist == "-" ? std::vector<int>{} : detail::parse_int_list(plist));
      bn.cpts.push_back(parse_real_list(cpt));
      continue;
    }
    const auto colon = t.find(':');
    if (colon == std::string::npos) throw IoError("truth line " + std::to_string(lineno) + ": expected 'key: value'");
    keys[detail::trim(t.substr(0, colon))] = detail::trim(t.substr(colon + 1));
  }
  auto need = [&](const std::string& k) -> const std::string& {
    auto it = keys.find(k);
    if (it == keys.end()) throw IoError("truth file missing '" + k + "'");
    return it->second;
  };
  auto need_int = [&](const std::string& k) { return detail::parse_int_list(need(k)).at(0); };
  const std::string& family = need("family");
  if (family == "ising") {
    IsingGridSpec s{need_int("rows"), need_int("cols"), detail::parse_real(need("coupling"))};
    return s;
  }
  if (family == "bayes-net") {
    bn.n = need_int("nodes");
    bn.max_parents = need_int("max_parents");
    bn.seed = std::stoull(need("seed"));
    bn.validate();
    return bn;
  }
  if (family == "table") {
    VariableSpec spec(detail::parse_int_list(need("cards")));
    return TableTruth{DenseTable(spec, parse_real_list(need("values")), TableKind::distribution)};
  }
  throw IoError("unknown truth family '" + family + "'");
}

void save_truth(const std::string& path, const TruthSpec& truth) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_truth(out, truth);
  if (!out) throw IoError("write to '" + path + "' failed");
}

TruthSpec load_truth(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  return read_truth(in);
}

}  // namespace fsll
