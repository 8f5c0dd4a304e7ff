#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fsll/core.hpp"

namespace fsll {

/// values[y] = r_y(N) = (ln N / 2 + sum_{i: y_i != 0} ln(n (|X_i| - 1))) / N.
struct RegularizerTable {
  VariableSpec spec;
  std::vector<double> values;
  std::uint64_t samples = 0;

  double operator[](std::size_t y) const { return values[y]; }
};

/// Built by an additive sweep over the axes, one pass per variable.
RegularizerTable regularizer(const VariableSpec& spec, std::uint64_t samples);

/// KL(p || q) with 0 ln 0 = 0; +infinity when q(x) = 0 < p(x).
double kl(std::span<const double> p, std::span<const double> q);
double kl(const DenseTable& p, const DenseTable& q);

/// Largest |d_bar| used as a target: 1 - 1/(2N).
double dual_limit(std::uint64_t samples);
double clamp_dual(double d_bar, std::uint64_t samples);

/// KL(p_d||p_theta') - KL(p_d||p_theta) when theta moves along the y axis so
/// that theta_bar_y goes from theta_bar0 to theta_bar1. |theta_bar0|, |theta_bar1| < 1.
double axis_kl_change(double theta_bar0, double d_bar, double theta_bar1);

struct AxisMove {
  double theta_offset = 0.0;  // new theta_y - old theta_y
  double delta = 0.0;         // change in cost
};

AxisMove delta_append(double theta_bar0, double d_bar, double r_y);
AxisMove delta_adjust(double theta_bar0, double d_bar);
double delta_remove(double theta_bar0, double d_bar, double theta_y0, double r_y);
/// -(theta_bar0 - d_bar)^2 / (1 - theta_bar0^2) + r_y, never above delta_append.
double lower_bound_append(double theta_bar0, double d_bar, double r_y);

enum class CandidateKind { append, adjust, remove };
std::string to_string(CandidateKind kind);

struct CandidateDelta {
  std::size_t y = 0;
  CandidateKind kind = CandidateKind::append;
  double new_theta = 0.0;
  double delta_cost = 0.0;
  double lower_bound = 0.0;
};

}  // namespace fsll
