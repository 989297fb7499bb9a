#include "entgap/eigensolver.hpp"
#include "entgap/errors.hpp"
#include "entgap/kernels.hpp"
#include "entgap/markov.hpp"
#include "entgap/spin_solvers.hpp"

#include "support.hpp"

#include <boost/rational.hpp>
#include <gtest/gtest.h>
#include <omp.h>

#include <numeric>
#include <random>

using namespace entgap;
using entgap::testing::max_abs;
using entgap::testing::random_vector;

namespace {

const std::vector<GateKind> kQubitGates = {GateKind::haar_u4(), GateKind::cnot(), GateKind::xy()};

double l1_distance(const WeightVector& a, const WeightVector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s;
}

}  // namespace

TEST(Topology, PairCountsAndRanges) {
  for (int n = 2; n <= 9; ++n) {
    EXPECT_EQ(Topology::open_chain(n).pair_count(), n - 1);
    EXPECT_EQ(Topology::periodic_chain(n).pair_count(), n);
    EXPECT_EQ(Topology::all_pairs(n).pair_count(), n * (n - 1) / 2);
    for (const auto& t : {Topology::open_chain(n), Topology::periodic_chain(n), Topology::all_pairs(n)})
      for (const auto& p : t.pairs()) {
        EXPECT_GE(p.first, 0);
        EXPECT_LT(p.first, n);
        EXPECT_GE(p.second, 0);
        EXPECT_LT(p.second, n);
        EXPECT_NE(p.first, p.second);
      }
  }
  EXPECT_EQ(Topology::periodic_chain(5).pairs().back(), (SitePair{4, 0}));
  EXPECT_THROW(Topology::parse("ring", 4), DomainError);
}

TEST(Assembly, TwoSitesGiveP16ForEveryTopology) {
  for (const auto& name : {"open", "periodic", "all"}) {
    const auto m = assemble(GateKind::haar_u4(), Topology::parse(name, 2));
    EXPECT_LT(max_abs(m.to_dense() - build_P(16).matrix), 1e-15) << name;
  }
}

TEST(Assembly, UniformVectorFixedForHaarOpenChain) {
  const auto m = assemble(GateKind::haar_u4(), Topology::open_chain(3));
  WeightVector u(64, 1.0 / 63);
  u[0] = 0.0;
  const auto y = m(u);
  for (std::size_t i = 0; i < u.size(); ++i) EXPECT_NEAR(y[i], u[i], 1e-12);
}

TEST(Assembly, CnotPeriodicChainIsDoublyStochastic) {
  const auto m = assemble(GateKind::cnot(), Topology::periodic_chain(3), {.build_sparse = true});
  const Eigen::MatrixXd d = m.to_dense();
  EXPECT_LT((d.rowwise().sum().array() - 1.0).abs().maxCoeff(), 1e-12);
  EXPECT_LT((d.colwise().sum().array() - 1.0).abs().maxCoeff(), 1e-12);
  const auto rep = check_stochasticity(m);
  EXPECT_LT(rep.row_sum_error, 1e-12);
  EXPECT_LT(rep.col_sum_error, 1e-12);
  EXPECT_LT(rep.identity_fixed_error, 1e-12);
  EXPECT_LT(rep.uniform_fixed_error, 1e-12);
}

TEST(Assembly, SparseMatchesImplicit) {
  for (const auto& g : kQubitGates) {
    const auto m = assemble(g, Topology::all_pairs(4), {.build_sparse = true});
    std::mt19937_64 rng(3);
    const auto x = random_vector(m.dim(), rng);
    const Eigen::VectorXd xs = Eigen::Map<const Eigen::VectorXd>(x.data(), x.size());
    const Eigen::VectorXd ys = m.sparse() * xs;
    const auto yi = m(x);
    for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(ys[i], yi[i], 1e-14);
  }
}

TEST(Assembly, SparseCapAndSizeChecks) {
  EXPECT_THROW(assemble(GateKind::cnot(), Topology::open_chain(9), {.sparse_site_cap = 8, .build_sparse = true}),
               CapExceeded);
  EXPECT_THROW(Topology::open_chain(1), DomainError);
}

TEST(Kernels, SerialAndParallelAreBitIdentical) {
  std::mt19937_64 rng(17);
  for (int d : {2, 3, 4}) {
    const int n = d == 4 ? 6 : (d == 3 ? 7 : 12);
    const Eigen::MatrixXd block = Eigen::MatrixXd::Random(d * d, d * d);
    const auto x = random_vector(static_cast<std::size_t>(std::pow(d, n)), rng);
    for (SitePair p : {SitePair{0, 1}, SitePair{n - 1, 0}, SitePair{2, n - 2}}) {
      std::vector<double> ys(x.size(), 0.0), yp(x.size(), 0.0);
      kernels::two_site_accumulate_serial(d, n, p, block, x, ys);
      kernels::two_site_accumulate_parallel(d, n, p, block, x, yp);
      EXPECT_EQ(ys, yp) << "d=" << d;
    }
  }
}

TEST(Kernels, OperatorBackendsAgreeAcrossThreadCounts) {
  const auto m = assemble(GateKind::xy(), Topology::periodic_chain(6));
  std::mt19937_64 rng(5);
  const auto x = random_vector(m.dim(), rng);
  std::vector<double> serial(x.size()), par1(x.size()), par4(x.size());
  m.apply(x, serial, Backend::Serial);
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  m.apply(x, par1, Backend::Parallel);
  omp_set_num_threads(4);
  m.apply(x, par4, Backend::Parallel);
  omp_set_num_threads(saved);
  EXPECT_EQ(serial, par1);
  EXPECT_EQ(serial, par4);
}

TEST(InitialWeights, ProductStates) {
  const auto x = initial_weights_z(2);
  const std::vector<std::size_t> ones = {0, 3, 12, 15};
  for (std::size_t a = 0; a < 16; ++a)
    EXPECT_EQ(x[a], std::find(ones.begin(), ones.end(), a) != ones.end() ? 1.0 : 0.0) << a;
  EXPECT_EQ(std::accumulate(x.begin(), x.end(), 0.0), 4.0);
  EXPECT_EQ(initial_weights(1, {1}), (WeightVector{1, 1, 0, 0}));
  EXPECT_THROW(initial_weights(2, {3}), DomainError);
}

TEST(Purity, ProductStateIsPure) {
  const auto x = initial_weights(4, {1, 2, 3, 1});
  EXPECT_DOUBLE_EQ(purity(x, 4, {0, 1}), 1.0);
  EXPECT_DOUBLE_EQ(purity(x, 4, {2}), 1.0);
  EXPECT_DOUBLE_EQ(purity(x, 4, {0, 2, 3}), 1.0);
}

TEST(Purity, FixedPointValues) {
  EXPECT_EQ(fixed_point(1), (WeightVector{1, 1.0 / 3, 1.0 / 3, 1.0 / 3}));
  EXPECT_NEAR(purity(fixed_point(4), 4, {0, 1}), 8.0 / 17, 1e-15);
  EXPECT_NEAR(purity(fixed_point(2), 2, {0}), 0.8, 1e-15);
  EXPECT_NEAR(haar_purity(4, 2), 8.0 / 17, 1e-15);
}

TEST(Purity, RejectsBadSubsystems) {
  const auto x = fixed_point(3);
  EXPECT_THROW(purity(x, 3, {}), DomainError);
  EXPECT_THROW(purity(x, 3, {0, 1, 2}), DomainError);
  EXPECT_THROW(purity(x, 3, {3}), DomainError);
  EXPECT_EQ(purity(x, 3, {1, 1}), purity(x, 3, {1}));
}

TEST(Purity, ExactRationalFixedPoint) {
  using Q = boost::rational<std::int64_t>;
  for (int n = 2; n <= 10; ++n) {
    const auto x = fixed_point_of<Q>(n);
    for (int na = 1; na < n; ++na) {
      std::vector<int> a;
      for (int s = n - na; s < n; ++s) a.push_back(s);
      const Q want((std::int64_t{1} << na) + (std::int64_t{1} << (n - na)), (std::int64_t{1} << n) + 1);
      EXPECT_EQ(purity_of<Q>(std::span<const Q>(x), n, a), want) << n << " " << na;
    }
  }
}

TEST(Evolve, ZeroStepsReturnsStart) {
  const auto m = assemble(GateKind::cnot(), Topology::open_chain(3));
  const auto x0 = initial_weights_z(3);
  const auto xs = evolve(m, x0, 0);
  ASSERT_EQ(xs.size(), 1U);
  EXPECT_EQ(xs[0], x0);
}

TEST(Evolve, OneHaarStepOnTwoSites) {
  const auto m = assemble(GateKind::haar_u4(), Topology::open_chain(2));
  const auto x1 = evolve(m, initial_weights_z(2), 1).back();
  EXPECT_DOUBLE_EQ(x1[0], 1.0);
  for (std::size_t a = 1; a < 16; ++a) EXPECT_NEAR(x1[a], 0.2, 1e-15);
  EXPECT_NEAR(purity(x1, 2, {0}), 0.8, 1e-15);
  const auto trace = evolve_purity(m, initial_weights_z(2), 1, {1});
  EXPECT_NEAR(trace.values[1], 0.8, 1e-15);
  EXPECT_NEAR(trace.distance_to_fixed_point[1], 0.0, 1e-14);
}

TEST(Evolve, ConservesIdentityWeightAndTotal) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 12; ++trial) {
    const auto& g = kQubitGates[trial % 3];
    const int n = 2 + static_cast<int>(rng() % 4);
    const char* topo = std::array{"open", "periodic", "all"}[rng() % 3];
    const auto m = assemble(g, Topology::parse(topo, n));
    const auto x = random_vector(m.dim(), rng, 0.0, 1.0);
    const auto y = m(x);
    EXPECT_NEAR(y[0], x[0], 1e-12);
    EXPECT_NEAR(std::accumulate(y.begin(), y.end(), 0.0), std::accumulate(x.begin(), x.end(), 0.0), 1e-10);
  }
}

TEST(Evolve, DistanceToFixedPointIsNonincreasing) {
  for (const auto& g : kQubitGates)
    for (const auto& topo : {Topology::open_chain(4), Topology::periodic_chain(4), Topology::all_pairs(4)}) {
      const auto trace = evolve_purity(assemble(g, topo), initial_weights_z(4), 40, {0, 1});
      for (std::size_t t = 1; t < trace.distance_to_fixed_point.size(); ++t)
        EXPECT_LE(trace.distance_to_fixed_point[t], trace.distance_to_fixed_point[t - 1] + 1e-12)
            << g.name() << " " << topo.name() << " t=" << t;
    }
}

TEST(Evolve, AsymptoticRateMatchesSubdominantEigenvalue) {
  const auto m = assemble(GateKind::haar_u4(), Topology::open_chain(4));
  const auto xs = evolve(m, initial_weights_z(4), 121);
  const auto star = fixed_point(4);
  const double ratio = l1_distance(xs[121], star) / l1_distance(xs[120], star);
  const double lambda = 1.0 - gap_closed_form(0.8, 4, Boundary::Open);
  EXPECT_NEAR(ratio, lambda, 1e-6);
}

TEST(FixedPoint, EveryGateAndTopology) {
  for (const auto& g : kQubitGates)
    for (int n = 2; n <= 6; ++n)
      for (const auto& name : {"open", "periodic", "all"}) {
        const auto m = assemble(g, Topology::parse(name, n));
        const auto star = fixed_point(n);
        const auto y = m(star);
        for (std::size_t i = 0; i < y.size(); ++i) ASSERT_NEAR(y[i], star[i], 1e-12);
      }
}
