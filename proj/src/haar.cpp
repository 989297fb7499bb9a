#include "entgap/haar.hpp"

#include "entgap/errors.hpp"

#include <cmath>
#include <complex>

namespace entgap {

Eigen::MatrixXcd sample_haar_unitary(int dim, Rng& rng) {
  if (dim != 2 && dim != 4) {
    throw InvalidDimension("sample_haar_unitary: dim must be 2 or 4");
  }
  std::normal_distribution<double> normal(0.0, M_SQRT1_2);
  Eigen::MatrixXcd z(dim, dim);
  for (int c = 0; c < dim; ++c) {
    for (int r = 0; r < dim; ++r) {
      const double re = normal(rng);
      const double im = normal(rng);
      z(r, c) = {re, im};
    }
  }
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
  Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(dim, dim);
  const Eigen::MatrixXcd& r = qr.matrixQR();
  for (int k = 0; k < dim; ++k) {
    const std::complex<double> d = r(k, k);
    const double mag = std::abs(d);
    q.col(k) *= mag > 0.0 ? d / mag : std::complex<double>(1.0, 0.0);
  }
  return q;
}

Eigen::MatrixXcd sample_haar_unitary(int dim, std::uint64_t seed) {
  Rng rng(seed);
  return sample_haar_unitary(dim, rng);
}

}  // namespace entgap
