#pragma once

// Exact and asymptotic solutions of the reduced spin models: the XY chain via
// Jordan-Wigner fermions, closed-form gaps, collective-spin (LMG) sectors for
// all-pairs coupling and its classical limit.
//
// XY chain: H = sum_pairs (1+gamma)/2 XX + (1-gamma)/2 YY + (h/2)(Z_i + Z_j),
// so an open chain carries field h/2 on its end sites. With the reduced block
// d + s h_XY the Markov eigenvalues are d + s E / L.

#include "entgap/eigensolver.hpp"
#include "entgap/markov.hpp"
#include "entgap/schmidt.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace entgap {

enum class Boundary { Periodic, Open };

struct XYChainSpec {
  int n = 2;
  double gamma = 0.0;
  double h = 0.0;
  Boundary boundary = Boundary::Periodic;
};

void validate(const XYChainSpec& spec);

enum class Parity { Even, Odd };

struct FermionSpectrum {
  Parity parity = Parity::Even;
  std::vector<double> momenta;   // k; momentum q = 2 pi k / n
  std::vector<double> energies;  // eps_k; unpaired modes carry h - cos q (signed)
  std::vector<bool> unpaired;    // q = 0 or pi
  /// -1 for odd n: many-body energies are sign * sum eps_k (2 n_k - 1).
  int sign = 1;
};

/// Even sector: k = 1/2, 3/2, ..., n - 1/2; odd sector: k = 0, 1, ..., n - 1.
/// Periodic chains only.
FermionSpectrum fermion_modes(const XYChainSpec& spec, Parity parity);

/// All 2^n many-body energies (even sector with an even number of occupied
/// modes, odd sector with an odd number), sorted descending.
std::vector<double> free_fermion_energies(const XYChainSpec& spec);

/// Dense H restricted to configurations with an even (or odd) number of
/// down spins; H preserves this parity. Basis index = position in the list
/// of bitstrings of that parity in increasing order.
Eigen::MatrixXd xy_hamiltonian_block(const XYChainSpec& spec, Parity parity);

/// Full H (dimension 2^n, n <= 12).
Eigen::MatrixXd xy_hamiltonian_dense(const XYChainSpec& spec);

/// All eigenvalues of H from the two parity blocks, sorted descending.
std::vector<double> xy_dense_energies(const XYChainSpec& spec);

struct TopEnergies {
  double e1 = 0.0;
  double e2 = 0.0;
  double e3 = 0.0;
  int e3_degeneracy = 0;
  std::string method;  // closed_form, free_fermion or dense
};

/// For gamma^2 + h^2 = 1 the closed forms; otherwise free fermions
/// (periodic) or dense diagonalization (open).
TopEnergies xy_top_eigenenergies(const XYChainSpec& spec);

/// Closed-form XY gap: periodic 2(1 - h cos(pi/n))/n, open (1 - h cos(pi/n))/(n-1).
double gap_closed_form(double h, int n, Boundary boundary);

/// Same for a reduced model: s (E1 - E3)/L with the closed-form energies.
/// Throws UnsupportedGate unless the model is of XY form with gamma^2 + h^2 = 1.
double gap_closed_form(const ReducedSpinModel& model, int n, Boundary boundary);

/// Periodic gap s (E1 - E3)/L from the free-fermion many-body energies.
double gap_free_fermion(const ReducedSpinModel& model, int n);

double convergence_time(double gap, double epsilon);

// --- collective spin (all-pairs) ---------------------------------------------

/// (2S+1)x(2S+1) matrix
///   (2 h_field/n) Sz + 4/(n(n-1)) (Jx Sx^2 + Jy Sy^2 + Jz Sz^2) + (d - (Jx+Jy+Jz)/(n-1))
/// in the basis m = S, S-1, ..., -S. S is given as two_s = 2S.
Eigen::MatrixXd lmg_build(const ReducedSpinModel& model, int n, int two_s);

/// Eigenvalues of the spin-S sector split by the number of down spins
/// (n/2 - m) mod 2; element 0 is the even block. Each list is descending.
std::array<std::vector<double>, 2> lmg_sector_spectrum(const ReducedSpinModel& model, int n, int two_s);

/// Number of spin-S multiplets in n spins-1/2: C(n, n/2-S) - C(n, n/2-S-1).
std::uint64_t lmg_sector_multiplicity(int n, int two_s);

struct LMGLevel {
  double value = 0.0;
  std::uint64_t multiplicity = 1;
  int two_s = 0;
  int parity = 0;
};

struct LMGGapResult {
  int n = 0;
  double gap = 0.0;
  double lambda3 = 0.0;
  /// Levels of one down-spin parity block plus the fixed point of the other
  /// block, descending; entry 3 is the fourth eigenvalue.
  std::vector<LMGLevel> bookkeeping;
  double fourth_value = 0.0;
  std::uint64_t fourth_multiplicity = 0;
  int fourth_two_s = 0;
  /// |second level of the even block - second level of the odd block|.
  double doublet_splitting = 0.0;
};

/// Diagonalizes sectors S = n/2 and n/2 - 1.
LMGGapResult lmg_gap(const ReducedSpinModel& model, int n);

/// Least-squares fit of n*Delta = a + b/n.
struct AsymptoteFit {
  double a = 0.0;
  double b = 0.0;
  std::vector<int> ns;
  std::vector<double> n_gap;
};
AsymptoteFit lmg_asymptote(const ReducedSpinModel& model, const std::vector<int>& ns);

struct ClassicalGap {
  double coefficient = 0.0;  // a in Delta = a/n + O(1/n^2)
  double mu = 0.0;
  double phi = 0.0;
  double maximum = 0.0;
  double hessian_det = 0.0;
  int newton_steps = 0;
};

/// Classical energy h(mu, phi) = h_field mu + (1 - mu^2)(Jx cos^2 phi + Jy sin^2 phi)
/// + Jz mu^2 + d; the oscillator spacing at its maximum gives a = 2 sqrt(det Hess).
/// Throws NotConverged when the maximum sits at a pole or is not quadratic.
ClassicalGap lmg_classical_gap(const ReducedSpinModel& model);

// --- numerical reduced chains --------------------------------------------------

struct NumericGap {
  double gap = 0.0;
  std::string method;  // dense or sparse
  SpectralResult spectrum;
  bool top_doubly_degenerate = false;
};

/// Gap of the reduced 2^n chain: dense up to dimension dense_cap, deflated
/// block iteration above, with the two known fixed vectors removed.
NumericGap xyz_chain_gap_numeric(const ReducedSpinModel& model, const Topology& topology,
                                 const DeflationOptions& options = {}, std::size_t dense_cap = 1024);

}  // namespace entgap
