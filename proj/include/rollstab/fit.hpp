// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

namespace rollstab {

// Least-squares fit of log(value) = log(constant) + exponent * log(1 + t).
struct RateFit {
  double exponent = 0;
  double constant = 0;
  double t_min = 0, t_max = 0;
  double residual = 0;  // rms residual in log-log coordinates
  std::size_t samples = 0;
};

RateFit fit_power_law(const std::vector<double>& t, const std::vector<double>& v, double t_min,
                      double t_max, std::size_t min_samples = 20);

// Least-squares fit of log(value) = log(constant) - rate * t.
struct ExpFit {
  double rate = 0;
  double constant = 0;
  double t_min = 0, t_max = 0;
  double residual = 0;
  std::size_t samples = 0;
};

ExpFit fit_exponential(const std::vector<double>& t, const std::vector<double>& v, double t_min,
                       double t_max, std::size_t min_samples = 3);

// n points geometrically spaced on [a, b].
std::vector<double> geomspace(double a, double b, std::size_t n);
std::vector<double> linspace(double a, double b, std::size_t n);

}  // namespace rollstab
