#include "entgap/markov.hpp"

#include "entgap/errors.hpp"
#include "entgap/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace entgap {

Topology Topology::open_chain(int n) {
  if (n < 2) throw DomainError("open chain needs n >= 2");
  std::vector<SitePair> p;
  for (int i = 0; i + 1 < n; ++i) p.push_back({i, i + 1});
  return {TopologyKind::OpenChain, n, std::move(p)};
}

Topology Topology::periodic_chain(int n) {
  if (n < 2) throw DomainError("periodic chain needs n >= 2");
  std::vector<SitePair> p;
  for (int i = 0; i + 1 < n; ++i) p.push_back({i, i + 1});
  p.push_back({n - 1, 0});
  return {TopologyKind::PeriodicChain, n, std::move(p)};
}

Topology Topology::all_pairs(int n) {
  if (n < 2) throw DomainError("all-pairs coupling needs n >= 2");
  std::vector<SitePair> p;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) p.push_back({i, j});
  return {TopologyKind::AllPairs, n, std::move(p)};
}

Topology Topology::make(TopologyKind kind, int n) {
  switch (kind) {
    case TopologyKind::OpenChain: return open_chain(n);
    case TopologyKind::PeriodicChain: return periodic_chain(n);
    case TopologyKind::AllPairs: return all_pairs(n);
  }
  throw DomainError("unknown topology");
}

Topology Topology::parse(const std::string& name, int n) {
  if (name == "open") return open_chain(n);
  if (name == "periodic") return periodic_chain(n);
  if (name == "all") return all_pairs(n);
  throw DomainError("unknown topology '" + name + "' (expected open, periodic or all)");
}

std::string Topology::name() const {
  switch (kind_) {
    case TopologyKind::OpenChain: return "open";
    case TopologyKind::PeriodicChain: return "periodic";
    case TopologyKind::AllPairs: return "all";
  }
  return "?";
}

namespace {

MarkovOperator::SparseMatrix assemble_sparse(const PairSumOperator& op) {
  const int d = op.local_dim();
  const int n = op.sites();
  const int m = d * d;
  const auto& block = op.block();
  const double scale = 1.0 / op.normalization();
  std::vector<Eigen::Triplet<double, long long>> triplets;
  const std::size_t fibres = ipow(d, n - 2);
  std::size_t nnz_block = 0;
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < m; ++c) nnz_block += block(r, c) != 0.0;
  triplets.reserve(fibres * nnz_block * op.pairs().size());

  std::vector<long long> idx(m);
  for (const auto& p : op.pairs()) {
    const int lo = std::min(p.first, p.second);
    const int hi = std::max(p.first, p.second);
    const std::size_t low_stride = ipow(d, lo);
    const std::size_t mid_span = ipow(d, hi - lo - 1);
    const std::size_t s1 = ipow(d, p.first);
    const std::size_t s2 = ipow(d, p.second);
    for (std::size_t r = 0; r < fibres; ++r) {
      const std::size_t below = r % low_stride;
      const std::size_t rest = r / low_stride;
      const std::size_t base = below + low_stride * d * (rest % mid_span + mid_span * d * (rest / mid_span));
      for (int b = 0; b < d; ++b)
        for (int a = 0; a < d; ++a) idx[a + d * b] = static_cast<long long>(base + a * s1 + b * s2);
      for (int row = 0; row < m; ++row)
        for (int col = 0; col < m; ++col)
          if (block(row, col) != 0.0) triplets.emplace_back(idx[row], idx[col], block(row, col) * scale);
    }
  }
  const auto dim = static_cast<long long>(op.dim());
  MarkovOperator::SparseMatrix s(dim, dim);
  s.setFromTriplets(triplets.begin(), triplets.end());
  return s;
}

}  // namespace

MarkovOperator::MarkovOperator(TwoSiteModel model, Topology topology, AssemblyOptions options)
    : model_(std::move(model)),
      topology_(std::move(topology)),
      op_(model_.local_dim(), topology_.sites(), topology_.pairs(), model_.matrix) {
  if (options.build_sparse) {
    if (topology_.sites() > options.sparse_site_cap) {
      throw CapExceeded("sparse assembly refused for n = " + std::to_string(topology_.sites()) +
                        " (cap " + std::to_string(options.sparse_site_cap) + "); use the implicit matvec");
    }
    sparse_ = std::make_shared<const SparseMatrix>(assemble_sparse(op_));
  }
}

void MarkovOperator::apply(std::span<const double> x, std::span<double> y, Backend backend) const {
  op_.apply(x, y, backend);
}

WeightVector MarkovOperator::operator()(const WeightVector& x) const {
  WeightVector y(x.size());
  apply(x, y);
  return y;
}

const MarkovOperator::SparseMatrix& MarkovOperator::sparse() const {
  if (!sparse_) throw Error("MarkovOperator: sparse form was not assembled");
  return *sparse_;
}

MarkovOperator assemble(const GateKind& gate, const Topology& topology, AssemblyOptions options) {
  if (topology.sites() < 2) throw DomainError("assemble: n must be >= 2");
  return MarkovOperator(build_two_site_model(gate), topology, options);
}

WeightVector initial_weights(int n, const std::vector<int>& axes) {
  if (n < 1) throw DomainError("initial_weights: n must be >= 1");
  if (static_cast<int>(axes.size()) != n) throw DomainError("initial_weights: need one axis per site");
  for (int a : axes)
    if (a < 1 || a > 3) throw DomainError("initial_weights: axis must be 1 (x), 2 (y) or 3 (z)");
  const std::size_t dim = ipow(4, n);
  WeightVector x(dim, 0.0);
  for (std::size_t alpha = 0; alpha < dim; ++alpha) {
    bool aligned = true;
    for (int s = 0; s < n && aligned; ++s) {
      const int digit = static_cast<int>((alpha >> (2 * s)) & 3U);
      aligned = digit == 0 || digit == axes[s];
    }
    if (aligned) x[alpha] = 1.0;
  }
  return x;
}

WeightVector initial_weights_z(int n) { return initial_weights(n, std::vector<int>(n, 3)); }

std::vector<WeightVector> evolve(const MarkovOperator& m, const WeightVector& x0, int steps) {
  if (x0.size() != m.dim()) throw InvalidDimension("evolve: dimension mismatch");
  if (steps < 0) throw DomainError("evolve: steps must be >= 0");
  std::vector<WeightVector> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  out.push_back(x0);
  for (int t = 0; t < steps; ++t) out.push_back(m(out.back()));
  return out;
}

namespace {

double l1_distance(const WeightVector& x, const WeightVector& y) {
  std::vector<double> diff(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) diff[i] = std::abs(x[i] - y[i]);
  return pairwise_sum(diff);
}

}  // namespace

PurityTrace evolve_purity(const MarkovOperator& m, const WeightVector& x0, int steps,
                          const std::vector<int>& subsystem) {
  if (x0.size() != m.dim()) throw InvalidDimension("evolve_purity: dimension mismatch");
  if (m.model().local_dim() != 4) throw DomainError("evolve_purity: purity is defined for qubit Pauli weights");
  const int n = m.sites();
  const auto sites = validate_subsystem(n, subsystem);
  const WeightVector star = fixed_point(n);
  PurityTrace trace;
  trace.n = n;
  trace.n_a = static_cast<int>(sites.size());
  trace.gate = m.gate().name();
  trace.topology = m.topology().name();
  WeightVector x = x0;
  WeightVector next(x.size());
  for (int t = 0; t <= steps; ++t) {
    trace.times.push_back(t);
    trace.values.push_back(purity(x, n, sites));
    trace.distance_to_fixed_point.push_back(l1_distance(x, star));
    if (t < steps) {
      m.apply(x, next);
      std::swap(x, next);
    }
  }
  return trace;
}

std::vector<int> validate_subsystem(int n, std::vector<int> subsystem) {
  std::sort(subsystem.begin(), subsystem.end());
  subsystem.erase(std::unique(subsystem.begin(), subsystem.end()), subsystem.end());
  if (subsystem.empty()) throw DomainError("purity: subsystem A must be non-empty");
  if (subsystem.front() < 0 || subsystem.back() >= n) throw DomainError("purity: site index out of range");
  if (static_cast<int>(subsystem.size()) == n) throw DomainError("purity: subsystem A must be a proper subset");
  return subsystem;
}

double purity(std::span<const double> x, int n, const std::vector<int>& subsystem) {
  const auto sites = validate_subsystem(n, subsystem);
  const int k = static_cast<int>(sites.size());
  if (x.size() != ipow(4, n)) throw InvalidDimension("purity: weight vector length is not 4^n");
  const std::size_t count = ipow(4, k);
  std::vector<double> terms(count);
  for (std::size_t local = 0; local < count; ++local) {
    std::size_t alpha = 0;
    for (int s = 0; s < k; ++s) alpha |= ((local >> (2 * s)) & 3U) << (2 * sites[s]);
    terms[local] = x[alpha];
  }
  return std::ldexp(pairwise_sum(terms), -k);
}

WeightVector fixed_point(int n) { return fixed_point_of<double>(n); }

double haar_purity(int n, int n_a) {
  if (n_a < 1 || n_a >= n) throw DomainError("haar_purity: need 0 < n_A < n");
  return (std::ldexp(1.0, n_a) + std::ldexp(1.0, n - n_a)) / (std::ldexp(1.0, n) + 1.0);
}

StochasticityReport check_stochasticity(const MarkovOperator& m) {
  StochasticityReport rep;
  const std::size_t dim = m.dim();
  std::vector<double> ones(dim, 1.0), out(dim);
  m.apply(ones, out);
  for (double v : out) rep.row_sum_error = std::max(rep.row_sum_error, std::abs(v - 1.0));

  std::vector<double> e0(dim, 0.0);
  e0[0] = 1.0;
  m.apply(e0, out);
  for (std::size_t i = 0; i < dim; ++i) rep.identity_fixed_error = std::max(rep.identity_fixed_error, std::abs(out[i] - e0[i]));

  std::vector<double> uniform(dim, 1.0);
  uniform[0] = 0.0;
  m.apply(uniform, out);
  for (std::size_t i = 0; i < dim; ++i) rep.uniform_fixed_error = std::max(rep.uniform_fixed_error, std::abs(out[i] - uniform[i]));

  if (m.has_sparse()) {
    const auto& s = m.sparse();
    Eigen::VectorXd colsum = Eigen::RowVectorXd::Ones(s.rows()) * s;
    rep.col_sum_error = (colsum.array() - 1.0).abs().maxCoeff();
  } else {
    // Column sums of M are averages of the block's column sums.
    const Eigen::MatrixXd& b = m.model().matrix;
    rep.col_sum_error = (b.colwise().sum().array() - 1.0).abs().maxCoeff();
  }
  return rep;
}

}  // namespace entgap
