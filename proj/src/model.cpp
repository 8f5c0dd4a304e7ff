#include "fsll/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

#include "fsll/errors.hpp"

namespace fsll {

void SparseTheta::set(std::size_t y, double value) {
  if (y == 0) throw DomainError("theta_0 is fixed at zero");
  if (value == 0.0)
    entries_.erase(y);
  else
    entries_[y] = value;
}

ModelState init_model(const VariableSpec& spec) {
  return ModelState{spec, make_bases(spec), SparseTheta{}, DenseTable::uniform(spec)};
}

double log_unnormalized(const ModelState& state, std::size_t x) {
  double l = 0.0;
  for (const auto& [y, theta] : state.theta) l += theta * basis_value(state.spec, state.bases, y, x);
  return l;
}

DenseTable recompute_density(const ModelState& state) {
  std::vector<double> l(state.spec.size(), 0.0);
  for (const auto& [y, theta] : state.theta) {
    const double t = theta;
    for_each_basis_sign(state.spec, state.bases, y, [&](std::size_t x, double sign) { l[x] += t * sign; });
  }
  const double top = *std::max_element(l.begin(), l.end());
  double z = 0.0;
  for (double& v : l) {
    v = std::exp(v - top);
    z += v;
  }
  for (double& v : l) v /= z;
  return DenseTable(state.spec, std::move(l), TableKind::distribution);
}

void apply_update(ModelState& state, std::size_t y, double new_value) {
  if (y == 0) throw DomainError("cannot update theta_0");
  if (y >= state.spec.size()) throw IndexError("basis index outside joint space");
  if (!std::isfinite(new_value)) throw NumericError("non-finite parameter value");
  const double old_value = state.theta.get(y);
  const double c_plus = std::exp(new_value - old_value);
  const double c_minus = 1.0 / c_plus;
  double sum = 0.0;
  double* p = state.p.values.data();
  for_each_basis_sign(state.spec, state.bases, y, [&](std::size_t x, double sign) {
    p[x] *= sign > 0.0 ? c_plus : c_minus;
    sum += p[x];
  });
  if (!(sum > 0.0) || !std::isfinite(sum)) throw NumericError("density update lost normalization");
  for (double& v : state.p.values) v /= sum;
  state.theta.set(y, new_value);
}

ModelState make_model(const VariableSpec& spec, SparseTheta theta) {
  ModelState state = init_model(spec);
  state.theta = std::move(theta);
  state.p = recompute_density(state);
  return state;
}

void write_model(std::ostream& out, const ModelState& state) {
  out << "# cards: " << state.spec.to_string() << '\n';
  for (const auto& [y, theta] : state.theta) {
    const auto digits = state.spec.unpack(y);
    std::string line;
    for (int d : digits) {
      line += std::to_string(d);
      line += ',';
    }
    line += detail::format_real(theta);
    out << line << '\n';
  }
}

ModelState read_model(std::istream& in) {
  static constexpr std::string_view kHeader = "# cards:";
  std::string line;
  if (!std::getline(in, line) || line.rfind(kHeader, 0) != 0) {
    throw IoError("model file must start with '# cards: ...' header");
  }
  VariableSpec spec(detail::parse_int_list(line.substr(kHeader.size())));
  SparseTheta theta;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    auto fields = detail::split(line, ',');
    if (fields.size() != static_cast<std::size_t>(spec.n()) + 1) {
      throw IoError("model line " + std::to_string(lineno) + ": expected " + std::to_string(spec.n() + 1) +
                    " fields");
    }
    const double value = detail::parse_real(fields.back());
    fields.pop_back();
    std::vector<int> digits;
    for (const auto& f : fields) digits.push_back(detail::parse_int_list(f).front());
    try {
      const std::size_t y = spec.pack(digits);
      if (y == 0) throw DomainError("theta_0 must not be stored");
      if (theta.contains(y)) throw DomainError("duplicate parameter");
      theta.set(y, value);
    } catch (const std::exception& e) {
      throw IoError("model line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return make_model(spec, std::move(theta));
}

void save_model(const std::string& path, const ModelState& state) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_model(out, state);
  if (!out) throw IoError("write to '" + path + "' failed");
}

ModelState load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  return read_model(in);
}

}  // namespace fsll
