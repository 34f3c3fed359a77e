#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "catlda/common.hpp"

namespace catlda {

inline double norm_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
}

inline double norm_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

inline double norm_quantile(double p) {
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

// Density of |Z| for Z ~ N(0, sigma^2).
inline double half_normal_pdf(double t, double sigma) {
  return 2.0 / sigma * norm_pdf(t / sigma);
}

inline double student_t_cdf(double x, double df) {
  return boost::math::cdf(boost::math::students_t_distribution<double>(df), x);
}

// Two-sided p-value of a t-type statistic.
inline double student_t_pvalue(double stat, double df) {
  return 2.0 * boost::math::cdf(
                   boost::math::complement(
                       boost::math::students_t_distribution<double>(df),
                       std::fabs(stat)));
}

inline double chi_squared_sf(double x, double df) {
  if (x <= 0.0) return 1.0;
  return boost::math::cdf(boost::math::complement(
      boost::math::chi_squared_distribution<double>(df), x));
}

// Order-statistic quantile with linear interpolation (R type 7).
inline double quantile_type7(std::vector<double> values, double p) {
  if (values.empty()) throw validation_error("quantile of empty vector");
  std::sort(values.begin(), values.end());
  if (values.size() == 1) return values[0];
  const double h = p * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

inline double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

// Unbiased sample standard deviation; zero for fewer than two values.
inline double sd_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

inline double median_of(std::vector<double> v) {
  if (v.empty()) throw validation_error("median of empty vector");
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) {
    const double lo = *std::max_element(v.begin(), v.begin() + mid);
    m = 0.5 * (m + lo);
  }
  return m;
}

}  // namespace catlda
