#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace entgap {

using Complex = std::complex<double>;

struct SpectralResult {
  std::vector<Complex> eigenvalues;  // descending modulus
  std::vector<double> residuals;     // ||A v - lambda v|| / ||v||, same order
  std::vector<std::size_t> clusters; // cluster sizes, descending modulus
  std::string method;
  int iterations = 0;
  bool certified = true;

  /// 1 - |lambda_3|, the Markov gap when the first two eigenvalues equal 1.
  double gap() const;
};

struct DenseOptions {
  std::size_t max_dim = 4096;
  bool compute_residuals = true;
  double cluster_tol = 1e-8;
};

/// Full spectrum. Symmetric input (to 1e-14) goes through the self-adjoint
/// solver, everything else through the real non-symmetric QR algorithm.
SpectralResult dense_spectrum(const Eigen::MatrixXd& a, const DenseOptions& options = {});

struct LinearMap {
  std::size_t dim = 0;
  std::function<void(std::span<const double>, std::span<double>)> apply;
};

struct DeflationOptions {
  int extra_block = 8;        // subspace size = k + extra_block
  double tol = 1e-8;          // residual certification
  double change_tol = 1e-12;  // relative change of Ritz values per sweep
  int max_iter = 100000;
  std::uint64_t seed = 1;
  double cluster_tol = 1e-8;
};

/// k largest-modulus eigenvalues of A restricted to the orthogonal complement
/// of `known_fixed`, by block orthogonal iteration with Rayleigh-Ritz.
/// The complement must be A-invariant: true for symmetric A, and for a
/// doubly stochastic Markov matrix with known_fixed = {e0, all-ones}.
/// On non-convergence returns the current estimates with certified = false.
SpectralResult deflated_leading(const LinearMap& a, const std::vector<Eigen::VectorXd>& known_fixed, int k,
                                const DeflationOptions& options = {});

struct ValueCluster {
  Complex centroid;
  std::size_t size = 0;
};

/// Single-linkage grouping of values closer than tol; clusters are returned
/// in descending modulus of their centroid.
std::vector<ValueCluster> cluster_values(std::span<const Complex> values, double tol);

/// Sizes of the clusters from cluster_values.
std::vector<std::size_t> degeneracy_clusters(std::span<const Complex> values, double tol);

struct MultisetComparison {
  bool equal = false;
  double max_deviation = 0.0;
  std::string detail;
};

/// Compares two spectra as multisets. Both sides are clustered with
/// cluster_tol; each cluster must find a partner of identical multiplicity
/// whose centroid lies within tol. Centroids are insensitive to the
/// sqrt(eps) splitting of defective eigenvalues.
MultisetComparison compare_spectra(std::span<const Complex> a, std::span<const Complex> b, double tol,
                                   double cluster_tol = 1e-6);

std::vector<Complex> to_complex(std::span<const double> values);

}  // namespace entgap
