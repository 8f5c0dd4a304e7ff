#include "fsll/cost.hpp"

#include <cmath>
#include <limits>

#include "fsll/errors.hpp"

namespace fsll {

namespace {

void check_model_dual(double theta_bar0) {
  if (!(std::abs(theta_bar0) < 1.0)) {
    throw NumericError("model dual parameter " + std::to_string(theta_bar0) + " outside (-1, 1)");
  }
}

void check_target_dual(double d_bar) {
  if (!(std::abs(d_bar) < 1.0)) {
    throw DomainError("target dual parameter " + std::to_string(d_bar) + " must be clamped into (-1, 1)");
  }
}

// weight * ln(ratio) with ratio = 1 + rel, and 0 * ln(anything) = 0.
double weighted_log1p(double weight, double rel) {
  if (weight == 0.0) return 0.0;
  return weight * std::log1p(rel);
}

}  // namespace

RegularizerTable regularizer(const VariableSpec& spec, std::uint64_t samples) {
  if (samples < 2) throw DomainError("regularizer needs N >= 2");
  const double n = static_cast<double>(spec.n());
  std::vector<double> acc;
  acc.reserve(spec.size());
  acc.push_back(std::log(static_cast<double>(samples)) / 2.0);
  // With x_0 fastest, growing the table one axis at a time appends whole blocks.
  for (int i = 0; i < spec.n(); ++i) {
    const double cost_i = std::log(n * static_cast<double>(spec.card(i) - 1));
    const std::size_t block = acc.size();
    for (int digit = 1; digit < spec.card(i); ++digit)
      for (std::size_t k = 0; k < block; ++k) acc.push_back(acc[k] + cost_i);
  }
  const auto N = static_cast<double>(samples);
  for (double& v : acc) v /= N;
  return RegularizerTable{spec, std::move(acc), samples};
}

double kl(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw DomainError("kl: tables differ in size");
  double sum = 0.0;
  for (std::size_t x = 0; x < p.size(); ++x) {
    if (p[x] <= 0.0) continue;
    if (q[x] <= 0.0) return std::numeric_limits<double>::infinity();
    sum += p[x] * std::log(p[x] / q[x]);
  }
  return sum;
}

double kl(const DenseTable& p, const DenseTable& q) {
  if (!(p.spec == q.spec)) throw DomainError("kl: spec mismatch");
  return kl(p.view(), q.view());
}

double dual_limit(std::uint64_t samples) { return 1.0 - 1.0 / (2.0 * static_cast<double>(samples)); }

double clamp_dual(double d_bar, std::uint64_t samples) {
  const double lim = dual_limit(samples);
  return std::fmax(-lim, std::fmin(lim, d_bar));
}

double axis_kl_change(double theta_bar0, double d_bar, double theta_bar1) {
  check_model_dual(theta_bar0);
  check_model_dual(theta_bar1);
  // ln((1+t0)/(1+t1)) = log1p((t0-t1)/(1+t1)), accurate when t0 ~ t1.
  const double plus = weighted_log1p((1.0 + d_bar) / 2.0, (theta_bar0 - theta_bar1) / (1.0 + theta_bar1));
  const double minus = weighted_log1p((1.0 - d_bar) / 2.0, (theta_bar1 - theta_bar0) / (1.0 - theta_bar1));
  return plus + minus;
}

AxisMove delta_adjust(double theta_bar0, double d_bar) {
  check_model_dual(theta_bar0);
  check_target_dual(d_bar);
  return AxisMove{std::atanh(d_bar) - std::atanh(theta_bar0), axis_kl_change(theta_bar0, d_bar, d_bar)};
}

AxisMove delta_append(double theta_bar0, double d_bar, double r_y) {
  AxisMove m = delta_adjust(theta_bar0, d_bar);
  m.delta += r_y;
  return m;
}

double delta_remove(double theta_bar0, double d_bar, double theta_y0, double r_y) {
  check_model_dual(theta_bar0);
  const double at_zero = std::tanh(-theta_y0 + std::atanh(theta_bar0));
  return axis_kl_change(theta_bar0, d_bar, at_zero) - r_y;
}

double lower_bound_append(double theta_bar0, double d_bar, double r_y) {
  check_model_dual(theta_bar0);
  const double gap = theta_bar0 - d_bar;
  return -(gap * gap) / ((1.0 - theta_bar0) * (1.0 + theta_bar0)) + r_y;
}

std::string to_string(CandidateKind kind) {
  switch (kind) {
    case CandidateKind::append: return "append";
    case CandidateKind::adjust: return "adjust";
    case CandidateKind::remove: return "remove";
  }
  return "?";
}

}  // namespace fsll
