#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>

namespace entgap {

using Rng = std::mt19937_64;

/// Haar-distributed unitary of dimension dim (2 or 4): QR of a complex
/// Ginibre matrix with the phases of R's diagonal absorbed into Q.
Eigen::MatrixXcd sample_haar_unitary(int dim, Rng& rng);
Eigen::MatrixXcd sample_haar_unitary(int dim, std::uint64_t seed);

}  // namespace entgap
