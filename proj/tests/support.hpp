#pragma once

#include "entgap/eigensolver.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

namespace entgap::testing {

inline double max_abs(const Eigen::MatrixXd& a) { return a.size() ? a.cwiseAbs().maxCoeff() : 0.0; }

inline double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline std::vector<double> random_vector(std::size_t dim, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(dim);
  for (double& x : v) x = u(rng);
  return v;
}

inline Eigen::MatrixXd random_symmetric(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd a(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) a(i, j) = g(rng);
  return (a + a.transpose()) / 2;
}

inline std::size_t count_near(const std::vector<Complex>& values, Complex target, double tol) {
  return static_cast<std::size_t>(
      std::count_if(values.begin(), values.end(), [&](const Complex& z) { return std::abs(z - target) <= tol; }));
}

}  // namespace entgap::testing
