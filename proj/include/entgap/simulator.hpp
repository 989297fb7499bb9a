#pragma once

// Statevector Monte Carlo of the random protocols. Amplitude index bit s is
// qubit s; a two-qubit gate on pair (first, second) uses the local index
// bit_first + 2 * bit_second, matching the Pauli label convention.

#include "entgap/haar.hpp"
#include "entgap/markov.hpp"
#include "entgap/pauli.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace entgap {

struct StateVector {
  int n = 0;
  Eigen::VectorXcd amplitudes;

  /// Product state polarised along +axis on every site (1 = x, 2 = y, 3 = z).
  static StateVector product(const std::vector<int>& axes);
  static StateVector all_zero(int n);
  double norm() const { return amplitudes.norm(); }
};

enum class ProtocolKind { HaarTwoQubit, FixedGatePlusLocalHaar };

struct ProtocolSpec {
  GateKind gate;
  Topology topology;
  ProtocolKind kind;
  int steps = 0;
  int trajectories = 1;
  std::uint64_t master_seed = 0;
  std::vector<int> subsystem;  // A

  /// HaarU4 -> HaarTwoQubit, CNOT / XYgate -> FixedGatePlusLocalHaar.
  static ProtocolSpec make(const GateKind& gate, const Topology& topology, std::vector<int> subsystem, int steps,
                           int trajectories, std::uint64_t seed);
};

void validate(const ProtocolSpec& spec);

/// Applies a 4x4 unitary to qubits (first, second).
void apply_two_qubit(Eigen::VectorXcd& psi, int n, SitePair pair, const Eigen::Matrix4cd& u);

/// W (V_second (x) V_first): the local gates act before the fixed gate.
Eigen::Matrix4cd dressed_gate(const Eigen::Matrix4cd& w, const Eigen::Matrix2cd& v_first, const Eigen::Matrix2cd& v_second);

/// tr(rho_A^2) for the pure state psi, via the Gram matrix of the reshaped
/// amplitudes on the smaller side of the cut.
double state_purity(const Eigen::VectorXcd& psi, int n, const std::vector<int>& subsystem);

/// Squared Pauli expectations x_alpha = <psi|sigma^alpha|psi>^2 (n <= 8).
WeightVector pauli_weights(const StateVector& state);

struct TrajectoryDiagnostics {
  int renormalizations = 0;
  double max_norm_drift = 0.0;
};

/// One trajectory: each step draws a pair uniformly, applies the protocol's
/// unitary and records the purity of A. Norm drift above 1e-9 is corrected,
/// above 1e-6 aborts with NotConverged.
PurityTrace run_trajectory(const ProtocolSpec& spec, const StateVector& initial, std::uint64_t trajectory_seed,
                           TrajectoryDiagnostics* diagnostics = nullptr);

struct EnsembleTrace {
  std::vector<int> times;
  std::vector<double> mean;
  std::vector<double> standard_error;
  /// samples[r][t]: purity of trajectory r at step t.
  std::vector<std::vector<double>> samples;
  int n = 0;
  int n_a = 0;
  std::string gate;
  std::string topology;
  int trajectories = 0;
  std::uint64_t seed = 0;
  TrajectoryDiagnostics diagnostics;
};

/// Trajectory r uses seed derive_seed(master_seed, r); the reduction runs in
/// trajectory order, so results do not depend on the thread count.
EnsembleTrace ensemble_purity(const ProtocolSpec& spec, const StateVector& initial);

/// Mean squared Pauli coefficients over trajectories at the final step.
WeightVector ensemble_pauli_weights(const ProtocolSpec& spec, const StateVector& initial);

struct DecayFit {
  double rate = 0.0;          // fitted -d/dt ln(I(t) - I_inf)
  double sigma = 0.0;         // jackknife over trajectories
  double window_bias = 0.0;   // same fit on the exact curve minus the expected rate
  double expected = 0.0;
  int t_min = 0;
  int t_max = 0;
  double combined_sigma() const;
  bool agrees(double n_sigma) const;
};

/// Least-squares fit of ln(mean I(t) - asymptote) over t in [t_min, t_max].
/// t_max is the last step before the signal drops below 8 standard errors.
/// `exact` (same length as the trace) supplies the window bias.
DecayFit fit_decay_rate(const EnsembleTrace& trace, double asymptote, double expected_rate,
                        const std::vector<double>& exact, int t_min = 5);

}  // namespace entgap
