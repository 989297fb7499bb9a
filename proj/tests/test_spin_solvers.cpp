#include "entgap/eigensolver.hpp"
#include "entgap/errors.hpp"
#include "entgap/markov.hpp"
#include "entgap/schmidt.hpp"
#include "entgap/spin_solvers.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace entgap;
using entgap::testing::max_diff;

namespace {

const std::vector<GateKind> kQubitGates = {GateKind::haar_u4(), GateKind::cnot(), GateKind::xy()};

double full_gap(const GateKind& g, const Topology& t) {
  return dense_spectrum(assemble(g, t).to_dense(), {.compute_residuals = false}).gap();
}

}  // namespace

TEST(FermionModes, UnpairedModesInOddSector) {
  const auto fs = fermion_modes({4, 0.6, 0.8, Boundary::Periodic}, Parity::Odd);
  ASSERT_TRUE(fs.unpaired[0]);
  EXPECT_NEAR(fs.energies[0], -0.2, 1e-15);
  ASSERT_TRUE(fs.unpaired[2]);
  EXPECT_NEAR(fs.energies[2], 1.8, 1e-15);
  EXPECT_FALSE(fs.unpaired[1]);
  EXPECT_EQ(fs.sign, 1);
  EXPECT_EQ(fermion_modes({5, 0.6, 0.8, Boundary::Periodic}, Parity::Odd).sign, -1);
}

TEST(FermionModes, EvenSectorMomentumGrid) {
  const auto fs = fermion_modes({4, 0.6, 0.8, Boundary::Periodic}, Parity::Even);
  EXPECT_EQ(fs.momenta, (std::vector<double>{0.5, 1.5, 2.5, 3.5}));
  EXPECT_NEAR(fs.energies[0], 1.0 - 0.8 * std::cos(M_PI / 4), 1e-12);
  EXPECT_NEAR(fs.energies[0], 0.43431457, 1e-8);
  for (bool u : fs.unpaired) EXPECT_FALSE(u);
}

TEST(FermionModes, IsingAtZeroField) {
  for (Parity p : {Parity::Even, Parity::Odd}) {
    const auto fs = fermion_modes({6, 1.0, 0.0, Boundary::Periodic}, p);
    for (double e : fs.energies) EXPECT_NEAR(std::abs(e), 1.0, 1e-14);
  }
}

TEST(FermionModes, OpenChainRejected) {
  EXPECT_THROW(fermion_modes({4, 0.6, 0.8, Boundary::Open}, Parity::Even), DomainError);
  EXPECT_THROW(validate(XYChainSpec{1, 0.6, 0.8, Boundary::Periodic}), DomainError);
}

TEST(FreeFermions, MatchDenseForRandomParameters) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int trial = 0; trial < 30; ++trial) {
    const XYChainSpec spec{2 + static_cast<int>(rng() % 9), u(rng), u(rng), Boundary::Periodic};
    const auto ff = free_fermion_energies(spec);
    const auto dense = xy_dense_energies(spec);
    ASSERT_EQ(ff.size(), dense.size());
    EXPECT_LT(max_diff(ff, dense), 1e-10) << "n=" << spec.n << " gamma=" << spec.gamma << " h=" << spec.h;
  }
}

TEST(FreeFermions, DenseBlocksPreserveParity) {
  const XYChainSpec spec{5, 0.3, 0.7, Boundary::Open};
  const Eigen::MatrixXd h = xy_hamiltonian_dense(spec);
  EXPECT_LT((h - h.transpose()).cwiseAbs().maxCoeff(), 1e-15);
  for (int r = 0; r < 32; ++r)
    for (int c = 0; c < 32; ++c)
      if ((std::popcount(static_cast<unsigned>(r)) - std::popcount(static_cast<unsigned>(c))) % 2 != 0)
        EXPECT_EQ(h(r, c), 0.0);
}

TEST(TopEnergies, PeriodicFourSites) {
  const auto top = xy_top_eigenenergies({4, 0.6, 0.8, Boundary::Periodic});
  EXPECT_NEAR(top.e1, top.e2, 1e-10);
  EXPECT_NEAR(top.e3, 4 - 4 * (1 - 0.8 / std::sqrt(2.0)), 1e-10);
  EXPECT_NEAR(top.e3, 2.26274170, 1e-8);
  EXPECT_EQ(top.e3_degeneracy, 1);
  const auto dense = xy_dense_energies({4, 0.6, 0.8, Boundary::Periodic});
  EXPECT_NEAR(dense[2], top.e3, 1e-10);
}

TEST(TopEnergies, OpenThreeSites) {
  const auto top = xy_top_eigenenergies({3, 0.6, 0.8, Boundary::Open});
  EXPECT_NEAR(top.e1, 2.0, 1e-10);
  EXPECT_NEAR(top.e3, 0.8, 1e-10);
  EXPECT_EQ(top.e3_degeneracy, 2);
  const auto dense = xy_dense_energies({3, 0.6, 0.8, Boundary::Open});
  EXPECT_NEAR(dense[2], 0.8, 1e-10);
  EXPECT_NEAR(dense[3], 0.8, 1e-10);
}

TEST(TopEnergies, TopPairDegenerateOnUnitCircle) {
  for (double theta : {0.2, 0.7, 1.1})
    for (int n = 2; n <= 10; ++n)
      for (Boundary b : {Boundary::Periodic, Boundary::Open}) {
        const auto dense = xy_dense_energies({n, std::cos(theta), std::sin(theta), b});
        EXPECT_NEAR(dense[0], dense[1], 1e-10) << n;
      }
}

TEST(ClosedFormGap, Values) {
  EXPECT_NEAR(gap_closed_form(0.8, 4, Boundary::Periodic), 0.21715729, 1e-8);
  EXPECT_NEAR(gap_closed_form(0.8, 3, Boundary::Open), 0.3, 1e-15);
  EXPECT_NEAR(10000 * gap_closed_form(0.8, 10000, Boundary::Periodic), 0.4, 1e-6);
  EXPECT_THROW(gap_closed_form(0.8, 2, Boundary::Periodic), DomainError);
}

TEST(ClosedFormGap, AgreesWithEnergiesAndFullOperator) {
  const auto m = reduce_gate(GateKind::haar_u4());
  for (int n = 3; n <= 12; ++n)
    for (Boundary b : {Boundary::Periodic, Boundary::Open}) {
      const auto dense = xy_dense_energies({n, 0.6, 0.8, b});
      const int L = b == Boundary::Periodic ? n : n - 1;
      EXPECT_NEAR(gap_closed_form(0.8, n, b), (dense[0] - dense[2]) / (2 * L), 1e-10) << n;
      EXPECT_NEAR(gap_closed_form(m, n, b), gap_closed_form(0.8, n, b), 1e-10) << n;
    }
  EXPECT_NEAR(full_gap(GateKind::haar_u4(), Topology::periodic_chain(4)), gap_closed_form(0.8, 4, Boundary::Periodic),
              1e-10);
  EXPECT_NEAR(gap_free_fermion(m, 7), gap_closed_form(0.8, 7, Boundary::Periodic), 1e-10);
}

TEST(ClosedFormGap, RefusesModelsOffTheCircle) {
  EXPECT_THROW(gap_closed_form(reduce_gate(GateKind::cnot()), 4, Boundary::Open), UnsupportedGate);
  EXPECT_THROW(gap_free_fermion(reduce_gate(GateKind::xy()), 4), UnsupportedGate);
}

TEST(ConvergenceTime, Values) {
  EXPECT_NEAR(convergence_time(0.3, std::exp(-1.0)), 1 / 0.3, 1e-12);
  EXPECT_NEAR(convergence_time(0.3, 1e-6), 46.051701859880914, 1e-10);
  EXPECT_NEAR(convergence_time(1.0, 0.5), std::log(2.0), 1e-15);
  EXPECT_THROW(convergence_time(0.0, 0.5), DomainError);
  EXPECT_THROW(convergence_time(0.5, 1.0), DomainError);
}

TEST(LMG, TwoSitesMatchReducedBlock) {
  const auto m = reduce_gate(GateKind::haar_u4());
  Eigen::EigenSolver<Eigen::MatrixXd> es(lmg_build(m, 2, 2));
  const Eigen::VectorXd block_ev = Eigen::EigenSolver<Eigen::Matrix4d>(m.block).eigenvalues().real();
  double top = -1e9;
  for (const auto& z : es.eigenvalues()) {
    top = std::max(top, z.real());
    EXPECT_LT((block_ev.array() - z.real()).abs().minCoeff(), 1e-10);
  }
  EXPECT_NEAR(top, 1.0, 1e-12);
}

TEST(LMG, TopSectorBoundedByOne) {
  for (const auto& g : kQubitGates)
    for (int n : {4, 7, 12, 31}) {
      const auto sectors = lmg_sector_spectrum(reduce_gate(g), n, n);
      for (const auto& s : sectors)
        for (double v : s) EXPECT_LE(v, 1.0 + 1e-12) << g.name() << " n=" << n;
    }
}

TEST(LMG, NoCouplingGivesOffset) {
  ReducedSpinModel m;
  m.d = 0.3;
  const Eigen::MatrixXd a = lmg_build(m, 6, 6);
  EXPECT_LT((a - 0.3 * Eigen::MatrixXd::Identity(7, 7)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(LMG, SectorMultiplicitiesCountTheHilbertSpace) {
  for (int n = 2; n <= 10; ++n) {
    std::uint64_t total = 0;
    for (int two_s = n % 2; two_s <= n; two_s += 2) total += lmg_sector_multiplicity(n, two_s) * (two_s + 1);
    EXPECT_EQ(total, std::uint64_t{1} << n) << n;
    EXPECT_EQ(lmg_sector_multiplicity(n, n - 2), static_cast<std::uint64_t>(n - 1));
  }
}

TEST(LMG, HundredSites) {
  EXPECT_NEAR(100 * lmg_gap(reduce_gate(GateKind::haar_u4()), 100).gap, 1.2, 0.05);
  EXPECT_NEAR(100 * lmg_gap(reduce_gate(GateKind::cnot()), 100).gap, 4.0 / 3, 0.05);
  EXPECT_NEAR(100 * lmg_gap(reduce_gate(GateKind::xy()), 100).gap, 4.0 / 3, 0.05);
}

TEST(LMG, FourthLevelMultiplicity) {
  for (const auto& g : kQubitGates)
    for (int n : {4, 8, 20, 200}) {
      const auto r = lmg_gap(reduce_gate(g), n);
      EXPECT_EQ(r.fourth_multiplicity, static_cast<std::uint64_t>(n - 1)) << g.name() << " n=" << n;
    }
}

TEST(LMG, EightSiteHaarClusters) {
  const auto r = lmg_gap(reduce_gate(GateKind::haar_u4()), 8);
  std::vector<Complex> values;
  for (const auto& lvl : r.bookkeeping)
    for (std::uint64_t k = 0; k < lvl.multiplicity; ++k) values.emplace_back(lvl.value);
  ASSERT_GE(values.size(), 12U);
  const auto sizes = degeneracy_clusters(values, 1e-8);
  ASSERT_GE(sizes.size(), 3U);
  EXPECT_EQ(sizes[0], 2U);
  EXPECT_EQ(sizes[1], 1U);
  EXPECT_EQ(sizes[2], 7U);
  EXPECT_EQ(entgap::testing::count_near(values, values[3], 1e-8), 7U);
  EXPECT_NEAR(r.fourth_value, values[3].real(), 1e-15);
}

TEST(LMG, AgreesWithFullOperatorAtSmallN) {
  for (const auto& g : kQubitGates) {
    const auto r = lmg_gap(reduce_gate(g), 4);
    EXPECT_NEAR(r.gap, full_gap(g, Topology::all_pairs(4)), 1e-9) << g.name();
  }
}

TEST(LMG, ApproachesClassicalCoefficient) {
  for (const auto& g : kQubitGates) {
    const auto m = reduce_gate(g);
    const double a = lmg_classical_gap(m).coefficient;
    double prev = 1e9;
    for (int n : {20, 40, 80, 160, 320}) {
      const double dev = std::abs(n * lmg_gap(m, n).gap - a);
      EXPECT_LT(dev, prev) << g.name() << " n=" << n;
      prev = dev;
    }
  }
}

TEST(LMG, ClassicalCoefficients) {
  EXPECT_NEAR(lmg_classical_gap(reduce_gate(GateKind::haar_u4())).coefficient, 1.2, 1e-9);
  EXPECT_NEAR(lmg_classical_gap(reduce_gate(GateKind::cnot())).coefficient, 4.0 / 3, 1e-9);
  EXPECT_NEAR(lmg_classical_gap(reduce_gate(GateKind::xy())).coefficient, 4.0 / 3, 1e-9);
}

TEST(LMG, ExtrapolationMatchesClassical) {
  for (const auto& g : kQubitGates) {
    const auto m = reduce_gate(g);
    EXPECT_NEAR(lmg_asymptote(m, {200, 400, 800}).a, lmg_classical_gap(m).coefficient, 1e-3) << g.name();
  }
}

TEST(NumericGap, CnotOpenThreeSitesMatchesFullOperator) {
  const auto r = xyz_chain_gap_numeric(reduce_gate(GateKind::cnot()), Topology::open_chain(3));
  EXPECT_NEAR(r.gap, full_gap(GateKind::cnot(), Topology::open_chain(3)), 1e-9);
}

TEST(NumericGap, XYPeriodicTopDoublet) {
  const auto r = xyz_chain_gap_numeric(reduce_gate(GateKind::xy()), Topology::periodic_chain(4));
  EXPECT_TRUE(r.top_doubly_degenerate);
  EXPECT_NEAR(r.spectrum.eigenvalues[0].real(), 1.0, 1e-9);
  EXPECT_NEAR(r.spectrum.eigenvalues[1].real(), 1.0, 1e-9);
}

TEST(NumericGap, IterativeMatchesDense) {
  for (const auto& g : kQubitGates) {
    const auto m = reduce_gate(g);
    for (const auto& t : {Topology::open_chain(8), Topology::periodic_chain(7)}) {
      const auto dense = xyz_chain_gap_numeric(m, t);
      const auto iter = xyz_chain_gap_numeric(m, t, {}, 0);
      EXPECT_EQ(dense.method, "dense");
      EXPECT_EQ(iter.method, "sparse");
      EXPECT_NEAR(dense.gap, iter.gap, 1e-8) << g.name() << " " << t.name();
    }
  }
}

TEST(NumericGap, CnotOpenChainScalesAsOneOverN) {
  const auto m = reduce_gate(GateKind::cnot());
  std::vector<double> ng;
  for (int n = 6; n <= 12; ++n) ng.push_back(n * xyz_chain_gap_numeric(m, Topology::open_chain(n)).gap);
  for (double v : ng) EXPECT_GT(v, 0.0);
  for (std::size_t i = 2; i < ng.size(); ++i)
    EXPECT_LT(std::abs(ng[i] - ng[i - 1]), std::abs(ng[i - 1] - ng[i - 2]) + 1e-12);
}
