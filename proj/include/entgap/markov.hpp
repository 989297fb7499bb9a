#pragma once

// Full n-qubit Markov operator M = (1/L) sum_pairs M2_pair on squared Pauli
// coefficients, weight-vector evolution and the purity functional.
//
// Weight convention: x_alpha = tr(rho sigma^alpha)^2, so x_0 = 1, sum x = 2^n
// for pure states and purity(A) = 2^-|A| sum_{supp(alpha) in A} x_alpha.

#include "entgap/errors.hpp"
#include "entgap/kernels.hpp"
#include "entgap/pauli.hpp"

#include <Eigen/Sparse>

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace entgap {

enum class TopologyKind { OpenChain, PeriodicChain, AllPairs };

class Topology {
 public:
  static Topology open_chain(int n);
  /// Ring; the wrap-around pair is (n-1, 0) so that every pair is oriented
  /// the same way along the chain. n = 2 yields the pair twice (L = 2).
  static Topology periodic_chain(int n);
  static Topology all_pairs(int n);
  static Topology make(TopologyKind kind, int n);
  /// Parses open | periodic | all.
  static Topology parse(const std::string& name, int n);

  TopologyKind kind() const { return kind_; }
  int sites() const { return n_; }
  const std::vector<SitePair>& pairs() const { return pairs_; }
  int pair_count() const { return static_cast<int>(pairs_.size()); }
  std::string name() const;

 private:
  Topology(TopologyKind kind, int n, std::vector<SitePair> pairs) : kind_(kind), n_(n), pairs_(std::move(pairs)) {}
  TopologyKind kind_;
  int n_;
  std::vector<SitePair> pairs_;
};

using WeightVector = std::vector<double>;

struct PurityTrace {
  std::vector<int> times;
  std::vector<double> values;
  std::vector<double> distance_to_fixed_point;
  int n = 0;
  int n_a = 0;
  std::string gate;
  std::string topology;
};

struct AssemblyOptions {
  /// Sparse row-compressed assembly only for n <= this; larger operators use
  /// the implicit fibre matvec exclusively.
  int sparse_site_cap = 8;
  bool build_sparse = false;
};

class MarkovOperator {
 public:
  using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

  MarkovOperator(TwoSiteModel model, Topology topology, AssemblyOptions options = {});

  int sites() const { return topology_.sites(); }
  std::size_t dim() const { return op_.dim(); }
  const Topology& topology() const { return topology_; }
  const TwoSiteModel& model() const { return model_; }
  const GateKind& gate() const { return model_.gate; }
  const PairSumOperator& implicit() const { return op_; }

  void apply(std::span<const double> x, std::span<double> y, Backend backend = Backend::Parallel) const;
  WeightVector operator()(const WeightVector& x) const;

  bool has_sparse() const { return sparse_ != nullptr; }
  const SparseMatrix& sparse() const;
  Eigen::MatrixXd to_dense(std::size_t max_dim = 4096) const { return op_.to_dense(max_dim); }

 private:
  TwoSiteModel model_;
  Topology topology_;
  PairSumOperator op_;
  std::shared_ptr<const SparseMatrix> sparse_;
};

/// Throws DomainError for n < 2; sparse assembly above the cap throws CapExceeded.
MarkovOperator assemble(const GateKind& gate, const Topology& topology, AssemblyOptions options = {});

/// Axis per site: 1 = x, 2 = y, 3 = z (the qubit is polarised along +axis).
WeightVector initial_weights(int n, const std::vector<int>& axes);
WeightVector initial_weights_z(int n);

std::vector<WeightVector> evolve(const MarkovOperator& m, const WeightVector& x0, int steps);

/// Exact purity of subsystem A along the evolution, with the L1 distance
/// to the fixed point at each step.
PurityTrace evolve_purity(const MarkovOperator& m, const WeightVector& x0, int steps, const std::vector<int>& subsystem);

/// Validates A as a non-empty proper subset of {0..n-1}; returns it sorted.
std::vector<int> validate_subsystem(int n, std::vector<int> subsystem);

/// 2^-|A| * sum over alpha supported inside A of x_alpha. Templated so the
/// same code runs in exact rational arithmetic.
template <class T>
T purity_of(std::span<const T> x, int n, const std::vector<int>& subsystem);

double purity(std::span<const double> x, int n, const std::vector<int>& subsystem);

/// x*_0 = 1, x*_alpha = 1/(2^n + 1) otherwise.
template <class T>
std::vector<T> fixed_point_of(int n);

WeightVector fixed_point(int n);

/// Haar-average purity (2^nA + 2^nB) / (2^n + 1).
double haar_purity(int n, int n_a);

/// Largest deviation from row/column stochasticity of the assembled sparse
/// matrix (small n only) plus the two fixed-point residuals.
struct StochasticityReport {
  double row_sum_error = 0.0;
  double col_sum_error = 0.0;
  double identity_fixed_error = 0.0;
  double uniform_fixed_error = 0.0;
};
StochasticityReport check_stochasticity(const MarkovOperator& m);

// ---------------------------------------------------------------------------

template <class T>
T purity_of(std::span<const T> x, int n, const std::vector<int>& subsystem) {
  const auto sites = validate_subsystem(n, subsystem);
  const int k = static_cast<int>(sites.size());
  if (x.size() != (std::size_t{1} << (2 * n))) throw InvalidDimension("purity: weight vector length is not 4^n");
  const std::size_t count = std::size_t{1} << (2 * k);
  T sum = T(0);
  for (std::size_t local = 0; local < count; ++local) {
    std::size_t alpha = 0;
    for (int s = 0; s < k; ++s) alpha |= ((local >> (2 * s)) & 3U) << (2 * sites[s]);
    sum += x[alpha];
  }
  return sum / T(std::int64_t{1} << k);
}

template <class T>
std::vector<T> fixed_point_of(int n) {
  if (n < 1) throw DomainError("fixed_point: n must be >= 1");
  const std::size_t dim = std::size_t{1} << (2 * n);
  std::vector<T> x(dim, T(1) / T((std::int64_t{1} << n) + 1));
  x[0] = T(1);
  return x;
}

}  // namespace entgap
