#pragma once

// Operator Schmidt decomposition of the two-site matrix, the common kernel of
// its local factors, and the resulting spin-1/2 model on the rotated
// two-dimensional local subspace.
//
// Factor convention: M2[(t' + d c'), (t + d c)] = sum_j kappa_j A_j[c', c] B_j[t', t],
// so A_j acts on the second site of the pair and B_j on the first.

#include "entgap/eigensolver.hpp"
#include "entgap/kernels.hpp"
#include "entgap/markov.hpp"
#include "entgap/pauli.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace entgap {

struct SchmidtDecomposition {
  int local_dim = 0;
  std::vector<double> kappa;           // descending, all > cutoff
  std::vector<Eigen::MatrixXd> a;      // second-site factors, Frobenius-orthonormal
  std::vector<Eigen::MatrixXd> b;      // first-site factors, Frobenius-orthonormal
  int rank() const { return static_cast<int>(kappa.size()); }
  Eigen::MatrixXd reconstruct() const;
};

/// SVD of the site-reshuffled matrix; singular values below `cutoff` are
/// dropped. The largest-magnitude entry of every A_j is made positive and
/// the sign carried by B_j.
SchmidtDecomposition operator_schmidt(const TwoSiteModel& model, double cutoff = 1e-12);

struct KernelBasis {
  std::vector<Eigen::VectorXd> vectors;  // orthonormal
  int dim() const { return static_cast<int>(vectors.size()); }
};

/// Orthonormal basis of the intersection of the right kernels of all A_j.
/// Throws ReductionUnavailable if the intersection is trivial.
KernelBasis common_kernel(const SchmidtDecomposition& dec, double threshold = 1e-10);

/// Largest |F v| over all factors F in `factors` and kernel vectors v.
double kernel_violation(const std::vector<Eigen::MatrixXd>& factors, const KernelBasis& kernel);

/// The fixed 4x4 orthogonal rotation whose rows 2 and 3 span the common kernel
/// (0, -2, 1, 1)/sqrt(6), (0, 0, -1, 1)/sqrt(2).
Eigen::Matrix4d rotation_U();

/// Largest principal angle (radians) between span(basis) and span(reference).
double subspace_angle(const std::vector<Eigen::VectorXd>& basis, const std::vector<Eigen::VectorXd>& reference);

/// Effective two-site operator
///   d 1(x)1 + Jx XX + Jy YY + Jz ZZ + (h_field/2)(Z(x)1 + 1(x)Z)
/// and its XY form scale * (h_XY(gamma, h)) + Jz ZZ + d 1(x)1 with
/// scale = Jx + Jy, gamma = (Jx - Jy)/scale, h = h_field/scale.
struct ReducedSpinModel {
  std::string gate;
  double d = 0.0;
  double jx = 0.0;
  double jy = 0.0;
  double jz = 0.0;
  double h_field = 0.0;
  double scale = 0.0;
  double gamma = 0.0;
  double h = 0.0;
  bool h_xy_form = false;       // Jz vanishes
  Eigen::Matrix4d block;        // index t + 2c, rotated state 0 = spin up
  int local_dim = 4;            // dimension of an unreduced site
  int kernel_dim = 2;           // local directions dropped per site
  int schmidt_rank = 0;
  double form_residual = 0.0;   // |block - XYZ reconstruction|_max
  double lower_left_norm = 0.0; // weight that leaks out of the kernel block
  Eigen::Vector2d fixed_identity;  // rotated image of the identity label
  Eigen::Vector2d fixed_uniform;   // rotated image of the local all-ones vector

  /// Jz measured in units of the XY scale.
  double jz_over_scale() const { return jz / scale; }
};

/// Rotates the Schmidt factors by U, keeps the kernel-free 2x2 corner and
/// resums. Throws ReductionUnavailable when the common kernel is not exactly
/// two-dimensional, the kernel columns do not vanish, or the corner is not of
/// XYZ-in-a-field form.
ReducedSpinModel reduce_two_site(const TwoSiteModel& model);

/// Reduction of P_{k^2} for k in {2, 3, 4, 9} via the rotation of
/// span{e0, uniform non-identity} with tan(2 theta) = sqrt(k - 1).
ReducedSpinModel reduce_generic_P(int k);

/// Dispatches on the gate: u4 / cnot / xy through reduce_two_site, p<m>
/// through reduce_generic_P.
ReducedSpinModel reduce_gate(const GateKind& gate);

/// 4x4 XYZ operator in the t + 2c basis from the parameters.
Eigen::Matrix4d xyz_block(double d, double jx, double jy, double jz, double h_field);

/// (1/L) sum over pairs of the reduced block on the 2^n space.
PairSumOperator build_reduced_chain(const ReducedSpinModel& model, const Topology& topology);

/// The two right fixed vectors of the reduced chain (tensor powers of the
/// local rotated identity and all-ones vectors), normalized.
std::vector<Eigen::VectorXd> reduced_fixed_vectors(const ReducedSpinModel& model, int n);

/// Eigenvalues of the full chain rebuilt from all sub-chains: for every set
/// K of kept sites, spectrum of (1/L) sum of blocks on pairs inside K, each
/// value repeated kernel_dim^(n - |K|) times. Enumerates 2^n subsets.
std::vector<Complex> subchain_spectrum_union(const ReducedSpinModel& model, const Topology& topology,
                                             int max_sites = 6);

}  // namespace entgap
