#pragma once

// Pauli-string labels and the two-site Markov matrices acting on squared
// Pauli coefficients.
//
// Conventions used throughout the library:
//   * single-site Pauli digit: 0 = identity, 1 = x, 2 = y, 3 = z;
//   * an n-site label is sum_i digit_i * 4^i, site 0 least significant;
//   * a two-site label is t + 4c where t is the digit on the first site of the
//     pair (the CNOT target) and c the digit on the second site (control);
//   * two-qubit gate matrices use computational index bit_t + 2 * bit_c.

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace entgap {

class PauliIndex {
 public:
  PauliIndex(std::uint64_t value, int sites);
  static PauliIndex from_digits(const std::vector<int>& digits);

  std::uint64_t value() const { return value_; }
  int sites() const { return sites_; }
  int digit(int site) const;
  std::vector<int> digits() const;
  /// Sites carrying a non-identity Pauli.
  std::vector<int> support() const;
  bool is_identity() const { return value_ == 0; }

 private:
  std::uint64_t value_;
  int sites_;
};

enum class GateTag { HaarU4, CNOT, XYgate, GenericP };

struct GateKind {
  GateTag tag = GateTag::HaarU4;
  int m = 16;  // only meaningful for GenericP

  static GateKind haar_u4() { return {GateTag::HaarU4, 16}; }
  static GateKind cnot() { return {GateTag::CNOT, 16}; }
  static GateKind xy() { return {GateTag::XYgate, 16}; }
  static GateKind generic_p(int m);

  /// Short flag-style name: u4, cnot, xy, p<m>.
  std::string name() const;
  /// Parses the CLI spellings u4, cnot, xy, p4, p9, p16, p81 (and any p<m>).
  static GateKind parse(const std::string& name);

  friend bool operator==(const GateKind&, const GateKind&) = default;
};

/// Two-site Markov matrix M2 on squared Pauli coefficients.
struct TwoSiteModel {
  int m = 0;
  Eigen::MatrixXd matrix;
  GateKind gate;

  /// Local (single-site) dimension, i.e. sqrt(m); throws if m is not square.
  int local_dim() const;
};

/// Block matrix diag(1, F) with F the (m-1)x(m-1) all-ones matrix over m-1.
TwoSiteModel build_P(int m);

Eigen::Matrix2cd pauli_matrix(int digit);
/// sigma^c (x) sigma^t for the two-site label t + 4c.
Eigen::Matrix4cd two_qubit_pauli(int label);

Eigen::Matrix4cd gate_matrix(const GateKind& gate);

using Permutation16 = std::array<int, 16>;

/// Map f with W sigma_a W^dagger = +- sigma_{f(a)}. Throws NotPauliPreserving
/// when any |tr(...)|/4 is neither 0 nor 1 (tolerance 1e-10) or a column
/// does not have exactly one unit entry.
Permutation16 derive_conjugation_permutation(const Eigen::Matrix4cd& W);

Eigen::MatrixXd permutation_matrix(const Permutation16& f);

/// HaarU4 -> P16; CNOT / XYgate -> D (P4 (x) P4); GenericP(m) -> P_m.
TwoSiteModel build_two_site_model(const GateKind& gate);

/// Checks the TwoSiteModel invariants (doubly stochastic, identity label
/// fixed); returns the largest violation found.
double two_site_invariant_violation(const TwoSiteModel& model);

struct HaarAverageEstimate {
  Eigen::MatrixXd mean;
  Eigen::MatrixXd standard_error;
  long samples = 0;
};

/// Monte Carlo estimate of E[T_ba^2] with T_ba = tr(sigma_b U sigma_a U^dag)/4
/// where U = W (V (x) V') with V, V' Haar on U(2), or U Haar on U(4) when
/// gate is HaarU4. Samples are split in fixed chunks with seeds derived from
/// `seed`, so the estimate is identical for any thread count.
HaarAverageEstimate haar_average_oracle(const GateKind& gate, long samples,
                                        std::uint64_t seed);
HaarAverageEstimate haar_average_oracle(const Eigen::Matrix4cd& W,
                                        long samples, std::uint64_t seed);

}  // namespace entgap
