#pragma once

#include <string>
#include <vector>

namespace qcap {

// least-squares line y = slope * x + intercept
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// 17 significant digits, "inf"/"-inf"/"nan" spelled out
std::string format_double(double v);

// n-point Gauss-Legendre rule on [a,b] applied to f
template <class F>
double gauss_legendre(F&& f, double a, double b);

namespace detail {
const std::vector<double>& gl_nodes();
const std::vector<double>& gl_weights();
}  // namespace detail

template <class F>
double gauss_legendre(F&& f, double a, double b) {
  const auto& x = detail::gl_nodes();
  const auto& w = detail::gl_weights();
  const double h = 0.5 * (b - a), m = 0.5 * (a + b);
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * f(m + h * x[i]);
  return h * s;
}

}  // namespace qcap
