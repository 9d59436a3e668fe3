// SPDX-License-Identifier: Apache-2.0
#include "rollstab/fit.hpp"

#include <cmath>
#include <sstream>

#include "rollstab/error.hpp"

namespace rollstab {

namespace {

struct Line {
  double slope = 0, intercept = 0, rms = 0;
};

Line least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) fail(ErrorCode::invalid_argument, "fit: degenerate abscissae in window");
  Line l;
  l.slope = sxy / sxx;
  l.intercept = my - l.slope * mx;
  double ss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (l.intercept + l.slope * x[i]);
    ss += r * r;
  }
  l.rms = std::sqrt(ss / n);
  return l;
}

void select_window(const std::vector<double>& t, const std::vector<double>& v, double t_min,
                   double t_max, std::size_t min_samples, std::vector<double>& xs,
                   std::vector<double>& ys, bool log_time) {
  require(t.size() == v.size(), "fit: times and values differ in length");
  require(t_min < t_max, "fit: window must satisfy t_min < t_max");
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_min || t[i] > t_max) continue;
    if (!(v[i] > 0.0) || !std::isfinite(v[i])) {
      std::ostringstream os;
      os << "fit: non-positive or non-finite value " << v[i] << " at t=" << t[i];
      fail(ErrorCode::invalid_argument, os.str());
    }
    xs.push_back(log_time ? std::log1p(t[i]) : t[i]);
    ys.push_back(std::log(v[i]));
  }
  if (xs.size() < min_samples) {
    std::ostringstream os;
    os << "fit: only " << xs.size() << " samples in window [" << t_min << ", " << t_max
       << "], need " << min_samples;
    fail(ErrorCode::invalid_argument, os.str());
  }
}

}  // namespace

RateFit fit_power_law(const std::vector<double>& t, const std::vector<double>& v, double t_min,
                      double t_max, std::size_t min_samples) {
  std::vector<double> xs, ys;
  select_window(t, v, t_min, t_max, min_samples, xs, ys, true);
  const Line l = least_squares(xs, ys);
  RateFit f;
  f.exponent = l.slope;
  f.constant = std::exp(l.intercept);
  f.t_min = t_min;
  f.t_max = t_max;
  f.residual = l.rms;
  f.samples = xs.size();
  return f;
}

ExpFit fit_exponential(const std::vector<double>& t, const std::vector<double>& v, double t_min,
                       double t_max, std::size_t min_samples) {
  std::vector<double> xs, ys;
  select_window(t, v, t_min, t_max, min_samples, xs, ys, false);
  const Line l = least_squares(xs, ys);
  ExpFit f;
  f.rate = -l.slope;
  f.constant = std::exp(l.intercept);
  f.t_min = t_min;
  f.t_max = t_max;
  f.residual = l.rms;
  f.samples = xs.size();
  return f;
}

std::vector<double> geomspace(double a, double b, std::size_t n) {
  require(a > 0.0 && b > 0.0 && n >= 2, "geomspace: need positive endpoints and n >= 2");
  std::vector<double> out(n);
  const double la = std::log(a), lb = std::log(b);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = std::exp(la + (lb - la) * static_cast<double>(i) / static_cast<double>(n - 1));
  out.front() = a;
  out.back() = b;
  return out;
}

std::vector<double> linspace(double a, double b, std::size_t n) {
  require(n >= 2, "linspace: need n >= 2");
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return out;
}

}  // namespace rollstab
