#include "entgap/errors.hpp"
#include "entgap/haar.hpp"
#include "entgap/markov.hpp"
#include "entgap/simulator.hpp"
#include "entgap/spin_solvers.hpp"

#include "support.hpp"

#include <gtest/gtest.h>
#include <omp.h>

#include <cmath>

using namespace entgap;

namespace {

Eigen::Matrix4cd kron_pair(const Eigen::Matrix2cd& second, const Eigen::Matrix2cd& first) {
  Eigen::Matrix4cd k;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) k(r, c) = second(r / 2, c / 2) * first(r % 2, c % 2);
  return k;
}

double full_state_purity(const Eigen::VectorXcd& psi) { return std::pow(psi.squaredNorm(), 2); }

}  // namespace

TEST(Haar, SamplesAreUnitary) {
  for (int dim : {2, 4})
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto u = sample_haar_unitary(dim, seed);
      EXPECT_LT((u.adjoint() * u - Eigen::MatrixXcd::Identity(dim, dim)).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(Haar, SecondMomentOfCornerEntry) {
  for (int dim : {2, 4}) {
    Rng rng(123 + dim);
    const int samples = 100000;
    double sum = 0.0, sum2 = 0.0;
    for (int s = 0; s < samples; ++s) {
      const double v = std::norm(sample_haar_unitary(dim, rng)(0, 0));
      sum += v;
      sum2 += v * v;
    }
    const double mean = sum / samples;
    const double se = std::sqrt((sum2 / samples - mean * mean) / (samples - 1));
    EXPECT_LE(std::abs(mean - 1.0 / dim), 5 * se) << dim;
  }
}

TEST(StateVector, ProductStates) {
  const auto z = StateVector::all_zero(3);
  EXPECT_EQ(z.amplitudes.size(), 8);
  EXPECT_EQ(z.amplitudes(0), Complex(1.0));
  const auto x = StateVector::product({1, 2, 3});
  EXPECT_NEAR(x.norm(), 1.0, 1e-15);
  const auto w = pauli_weights(x);
  const auto expected = initial_weights(3, {1, 2, 3});
  for (std::size_t a = 0; a < w.size(); ++a) EXPECT_NEAR(w[a], expected[a], 1e-14) << a;
}

TEST(Gates, ApplyTwoQubitUsesLocalIndexConvention) {
  auto psi = StateVector::product({3, 3, 3}).amplitudes;
  Eigen::Matrix4cd x_on_first = Eigen::Matrix4cd::Zero();
  for (int i = 0; i < 4; ++i) x_on_first(i ^ 1, i) = 1.0;
  apply_two_qubit(psi, 3, {2, 0}, x_on_first);
  EXPECT_NEAR(std::abs(psi(4)), 1.0, 1e-15);
  EXPECT_THROW(apply_two_qubit(psi, 3, {1, 1}, x_on_first), DomainError);
}

TEST(Gates, DressedGateOrder) {
  const Eigen::Matrix4cd w = gate_matrix(GateKind::xy());
  const Eigen::Matrix2cd v1 = sample_haar_unitary(2, 1);
  const Eigen::Matrix2cd v2 = sample_haar_unitary(2, 2);
  EXPECT_LT((dressed_gate(w, v1, v2) - w * kron_pair(v2, v1)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Purity, BellPairAndComplementSymmetry) {
  Eigen::VectorXcd bell = Eigen::VectorXcd::Zero(4);
  bell(0) = bell(3) = M_SQRT1_2;
  EXPECT_NEAR(state_purity(bell, 2, {0}), 0.5, 1e-15);
  Rng rng(4);
  std::normal_distribution<double> g;
  Eigen::VectorXcd psi(32);
  for (auto& a : psi) a = Complex(g(rng), g(rng));
  psi.normalize();
  EXPECT_NEAR(state_purity(psi, 5, {0, 3}), state_purity(psi, 5, {1, 2, 4}), 1e-12);
  EXPECT_NEAR(state_purity(psi, 5, {4}), state_purity(psi, 5, {0, 1, 2, 3}), 1e-12);
}

TEST(Trajectory, ZeroStepsIsPure) {
  const auto spec = ProtocolSpec::make(GateKind::cnot(), Topology::open_chain(3), {0}, 0, 1, 5);
  const auto t = run_trajectory(spec, StateVector::all_zero(3), 5);
  ASSERT_EQ(t.values.size(), 1U);
  EXPECT_EQ(t.values[0], 1.0);
}

TEST(Trajectory, GlobalStateStaysPure) {
  const auto spec = ProtocolSpec::make(GateKind::xy(), Topology::all_pairs(5), {0, 1}, 200, 1, 5);
  TrajectoryDiagnostics diag;
  run_trajectory(spec, StateVector::all_zero(5), 9, &diag);
  EXPECT_LT(diag.max_norm_drift, 1e-10);
  Eigen::VectorXcd psi = StateVector::all_zero(4).amplitudes;
  Rng rng(1);
  for (int s = 0; s < 100; ++s) {
    apply_two_qubit(psi, 4, {static_cast<int>(s % 4), static_cast<int>((s + 1) % 4)},
                    dressed_gate(gate_matrix(GateKind::cnot()), sample_haar_unitary(2, rng), sample_haar_unitary(2, rng)));
    EXPECT_NEAR(full_state_purity(psi), 1.0, 1e-10);
  }
}

TEST(Ensemble, OneHaarStepOnTwoSites) {
  const auto spec = ProtocolSpec::make(GateKind::haar_u4(), Topology::open_chain(2), {0}, 1, 100000, 31);
  const auto tr = ensemble_purity(spec, StateVector::all_zero(2));
  EXPECT_LE(std::abs(tr.mean[1] - 0.8), 5 * tr.standard_error[1]);
}

TEST(Ensemble, LongTimeLimitIsHaarValue) {
  const auto spec = ProtocolSpec::make(GateKind::haar_u4(), Topology::open_chain(4), {0, 1}, 120, 2000, 3);
  const auto tr = ensemble_purity(spec, StateVector::all_zero(4));
  EXPECT_LE(std::abs(tr.mean.back() - 8.0 / 17), 5 * tr.standard_error.back());
}

TEST(Ensemble, MatchesExactEvolutionStepByStep) {
  for (const auto& [g, t] : {std::pair{GateKind::haar_u4(), Topology::open_chain(4)},
                             std::pair{GateKind::cnot(), Topology::periodic_chain(4)}}) {
    const auto spec = ProtocolSpec::make(g, t, {0, 1}, 60, 2000, 11);
    const auto tr = ensemble_purity(spec, StateVector::all_zero(4));
    const auto exact = evolve_purity(assemble(g, t), initial_weights_z(4), 60, {0, 1}).values;
    for (int s = 0; s <= 60; ++s)
      EXPECT_LE(std::abs(tr.mean[s] - exact[s]), std::max(5 * tr.standard_error[s], 1e-12)) << g.name() << " t=" << s;
  }
}

TEST(Ensemble, DecayRateMatchesGapForFiveSites) {
  const auto t = Topology::open_chain(5);
  const auto spec = ProtocolSpec::make(GateKind::haar_u4(), t, {0, 1}, 80, 2000, 21);
  const auto tr = ensemble_purity(spec, StateVector::all_zero(5));
  const auto exact = evolve_purity(assemble(GateKind::haar_u4(), t), initial_weights_z(5), 80, {0, 1}).values;
  const double delta = gap_closed_form(0.8, 5, Boundary::Open);
  const auto fit = fit_decay_rate(tr, haar_purity(5, 2), -std::log(1.0 - delta), exact);
  EXPECT_TRUE(fit.agrees(3.0)) << fit.rate << " vs " << fit.expected << " sigma " << fit.combined_sigma();
}

TEST(Ensemble, ReproducibleAcrossRunsAndThreadCounts) {
  const auto spec = ProtocolSpec::make(GateKind::cnot(), Topology::all_pairs(4), {0}, 20, 64, 99);
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const auto a = ensemble_purity(spec, StateVector::all_zero(4));
  omp_set_num_threads(3);
  const auto b = ensemble_purity(spec, StateVector::all_zero(4));
  omp_set_num_threads(saved);
  const auto c = ensemble_purity(spec, StateVector::all_zero(4));
  EXPECT_EQ(a.samples, b.samples);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.mean, c.mean);
  EXPECT_EQ(a.standard_error, c.standard_error);
}

TEST(Ensemble, PauliWeightsFollowMarkovEvolution) {
  for (const auto& g : {GateKind::cnot(), GateKind::xy()}) {
    const auto t = Topology::open_chain(3);
    const auto spec = ProtocolSpec::make(g, t, {0}, 2, 20000, 8);
    const auto mc = ensemble_pauli_weights(spec, StateVector::all_zero(3));
    const auto exact = evolve(assemble(g, t), initial_weights_z(3), 2).back();
    for (std::size_t a = 0; a < exact.size(); ++a) EXPECT_NEAR(mc[a], exact[a], 0.02) << g.name() << " " << a;
  }
}

TEST(Protocol, Validation) {
  EXPECT_THROW(validate(ProtocolSpec::make(GateKind::cnot(), Topology::open_chain(21), {0}, 1, 1, 1)), CapExceeded);
  EXPECT_THROW(validate(ProtocolSpec::make(GateKind::cnot(), Topology::open_chain(3), {0}, 1, 0, 1)), DomainError);
  EXPECT_THROW(validate(ProtocolSpec::make(GateKind::generic_p(9), Topology::open_chain(3), {0}, 1, 1, 1)),
               DomainError);
}
