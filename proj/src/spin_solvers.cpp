#include "entgap/spin_solvers.hpp"

#include "entgap/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace entgap {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kMaxDenseSites = 12;
constexpr int kMaxFermionSites = 24;

bool on_unit_circle(double gamma, double h, double tol = 1e-12) { return std::abs(gamma * gamma + h * h - 1.0) <= tol; }

Topology chain_topology(const XYChainSpec& spec) {
  return spec.boundary == Boundary::Periodic ? Topology::periodic_chain(spec.n) : Topology::open_chain(spec.n);
}

}  // namespace

void validate(const XYChainSpec& spec) {
  if (spec.n < 2) throw DomainError("XY chain needs n >= 2");
  if (!std::isfinite(spec.gamma) || !std::isfinite(spec.h)) throw DomainError("XY chain parameters must be finite");
}

FermionSpectrum fermion_modes(const XYChainSpec& spec, Parity parity) {
  validate(spec);
  if (spec.boundary != Boundary::Periodic) throw DomainError("fermion_modes: periodic chains only");
  const int n = spec.n;
  const bool simplified = on_unit_circle(spec.gamma, spec.h) && std::abs(spec.h) <= 1.0;
  FermionSpectrum fs;
  fs.parity = parity;
  fs.sign = n % 2 == 0 ? 1 : -1;
  for (int i = 0; i < n; ++i) {
    const double k = parity == Parity::Even ? i + 0.5 : static_cast<double>(i);
    const double q = 2.0 * kPi * k / n;
    const bool unpaired = parity == Parity::Odd && (2 * i) % n == 0;
    double eps;
    if (unpaired) {
      eps = spec.h - std::cos(q);
    } else {
      const double c = std::cos(q) - spec.h;
      const double s = spec.gamma * std::sin(q);
      eps = std::sqrt(c * c + s * s);
      if (simplified) {
        const double short_form = 1.0 - spec.h * std::cos(q);
        if (std::abs(short_form - eps) > 1e-10) throw Error("fermion_modes: simplified dispersion disagrees");
        eps = short_form;
      }
    }
    fs.momenta.push_back(k);
    fs.energies.push_back(eps);
    fs.unpaired.push_back(unpaired);
  }
  return fs;
}

std::vector<double> free_fermion_energies(const XYChainSpec& spec) {
  validate(spec);
  if (spec.n > kMaxFermionSites) throw CapExceeded("free_fermion_energies: n too large to enumerate");
  const int n = spec.n;
  std::vector<double> out;
  out.reserve(std::size_t{1} << n);
  for (Parity p : {Parity::Even, Parity::Odd}) {
    const auto fs = fermion_modes(spec, p);
    const unsigned want = p == Parity::Even ? 0U : 1U;
    for (std::uint32_t occ = 0; occ < (1U << n); ++occ) {
      if ((static_cast<unsigned>(std::popcount(occ)) & 1U) != want) continue;
      double e = 0.0;
      for (int k = 0; k < n; ++k) e += fs.energies[k] * ((occ >> k & 1U) ? 1.0 : -1.0);
      out.push_back(fs.sign * e);
    }
  }
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

Eigen::MatrixXd xy_hamiltonian_block(const XYChainSpec& spec, Parity parity) {
  validate(spec);
  if (spec.n > kMaxDenseSites + 1) throw CapExceeded("xy_hamiltonian_block: n too large for dense diagonalization");
  const int n = spec.n;
  const unsigned want = parity == Parity::Even ? 0U : 1U;
  std::vector<std::uint32_t> states;
  std::vector<int> pos(std::size_t{1} << n, -1);
  for (std::uint32_t s = 0; s < (1U << n); ++s) {
    if ((static_cast<unsigned>(std::popcount(s)) & 1U) != want) continue;
    pos[s] = static_cast<int>(states.size());
    states.push_back(s);
  }
  const auto dim = static_cast<Eigen::Index>(states.size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  const auto topo = chain_topology(spec);
  for (const auto& p : topo.pairs()) {
    for (Eigen::Index a = 0; a < dim; ++a) {
      const std::uint32_t s = states[a];
      const unsigned bi = s >> p.first & 1U;
      const unsigned bj = s >> p.second & 1U;
      const double zi = bi ? -1.0 : 1.0;
      const double zj = bj ? -1.0 : 1.0;
      h(a, a) += spec.h / 2 * (zi + zj);
      const std::uint32_t t = s ^ (1U << p.first) ^ (1U << p.second);
      h(pos[t], a) += bi == bj ? spec.gamma : 1.0;
    }
  }
  return h;
}

Eigen::MatrixXd xy_hamiltonian_dense(const XYChainSpec& spec) {
  validate(spec);
  if (spec.n > kMaxDenseSites) throw CapExceeded("xy_hamiltonian_dense: n > 12");
  const int n = spec.n;
  const auto dim = Eigen::Index{1} << n;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  for (Parity p : {Parity::Even, Parity::Odd}) {
    const unsigned want = p == Parity::Even ? 0U : 1U;
    std::vector<Eigen::Index> states;
    for (Eigen::Index s = 0; s < dim; ++s)
      if ((static_cast<unsigned>(std::popcount(static_cast<std::uint32_t>(s))) & 1U) == want) states.push_back(s);
    const auto block = xy_hamiltonian_block(spec, p);
    for (std::size_t r = 0; r < states.size(); ++r)
      for (std::size_t c = 0; c < states.size(); ++c) h(states[r], states[c]) = block(r, c);
  }
  return h;
}

std::vector<double> xy_dense_energies(const XYChainSpec& spec) {
  validate(spec);
  if (spec.n > kMaxDenseSites) throw CapExceeded("xy_dense_energies: n > 12");
  std::vector<double> out;
  for (Parity p : {Parity::Even, Parity::Odd}) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(xy_hamiltonian_block(spec, p), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NotConverged("xy_dense_energies: eigensolver failed");
    out.insert(out.end(), es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  }
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

namespace {

int degeneracy_at(const std::vector<double>& sorted_desc, double value, double tol = 1e-9) {
  return static_cast<int>(std::count_if(sorted_desc.begin(), sorted_desc.end(),
                                        [&](double e) { return std::abs(e - value) <= tol; }));
}

}  // namespace

TopEnergies xy_top_eigenenergies(const XYChainSpec& spec) {
  validate(spec);
  const int n = spec.n;
  TopEnergies t;
  if (on_unit_circle(spec.gamma, spec.h)) {
    t.method = "closed_form";
    const double drop = 1.0 - std::abs(spec.h) * std::cos(kPi / n);
    if (spec.boundary == Boundary::Periodic) {
      t.e1 = t.e2 = n;
      t.e3 = n - 4.0 * drop;
      t.e3_degeneracy = n == 2 ? 2 : 1;
    } else {
      t.e1 = t.e2 = n - 1;
      t.e3 = (n - 1) - 2.0 * drop;
      t.e3_degeneracy = 2;
    }
    return t;
  }
  std::vector<double> e;
  if (spec.boundary == Boundary::Periodic) {
    t.method = "free_fermion";
    e = free_fermion_energies(spec);
  } else {
    t.method = "dense";
    e = xy_dense_energies(spec);
  }
  t.e1 = e[0];
  t.e2 = e[1];
  t.e3 = e[2];
  t.e3_degeneracy = degeneracy_at(e, t.e3);
  return t;
}

double gap_closed_form(double h, int n, Boundary boundary) {
  if (boundary == Boundary::Periodic) {
    if (n < 3) throw DomainError("periodic closed-form gap needs n >= 3");
    return 2.0 * (1.0 - h * std::cos(kPi / n)) / n;
  }
  if (n < 2) throw DomainError("open closed-form gap needs n >= 2");
  return (1.0 - h * std::cos(kPi / n)) / (n - 1);
}

namespace {

void require_markov_xy(const ReducedSpinModel& model) {
  if (!model.h_xy_form || !on_unit_circle(model.gamma, model.h, 1e-10) || std::abs(model.d + model.scale - 1.0) > 1e-10) {
    throw UnsupportedGate("closed-form gap needs an XY-reducible model with gamma^2 + h^2 = 1 (gate " + model.gate +
                          "); use a numerical method");
  }
}

}  // namespace

double gap_closed_form(const ReducedSpinModel& model, int n, Boundary boundary) {
  require_markov_xy(model);
  if (boundary == Boundary::Periodic && n < 3) throw DomainError("periodic closed-form gap needs n >= 3");
  const auto top = xy_top_eigenenergies({n, model.gamma, model.h, boundary});
  const double L = boundary == Boundary::Periodic ? n : n - 1;
  return model.scale * (top.e1 - top.e3) / L;
}

double gap_free_fermion(const ReducedSpinModel& model, int n) {
  if (!model.h_xy_form) throw UnsupportedGate("free-fermion gap needs Jz = 0 (gate " + model.gate + ")");
  if (n < 3) throw DomainError("periodic gap needs n >= 3");
  const auto e = free_fermion_energies({n, model.gamma, model.h, Boundary::Periodic});
  return model.scale * (e[0] - e[2]) / n;
}

double convergence_time(double gap, double epsilon) {
  if (!(gap > 0.0 && gap <= 1.0)) throw DomainError("convergence_time: gap must lie in (0, 1]");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("convergence_time: epsilon must lie in (0, 1)");
  return std::log(1.0 / epsilon) / gap;
}

// --- collective spin ----------------------------------------------------------

namespace {

void validate_sector(int n, int two_s) {
  if (n < 2) throw DomainError("LMG: n must be >= 2");
  if (two_s < 0 || two_s > n) throw DomainError("LMG: need 0 <= S <= n/2");
  if ((n - two_s) % 2 != 0) throw DomainError("LMG: n/2 - S must be an integer");
}

}  // namespace

Eigen::MatrixXd lmg_build(const ReducedSpinModel& model, int n, int two_s) {
  validate_sector(n, two_s);
  const int dim = two_s + 1;
  const double s = two_s / 2.0;
  const double pre = 4.0 / (static_cast<double>(n) * (n - 1));
  const double shift = model.d - (model.jx + model.jy + model.jz) / (n - 1);
  auto m_of = [&](int a) { return s - a; };
  auto raise = [&](double m) { return std::sqrt(std::max(0.0, s * (s + 1) - m * (m + 1))); };
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dim, dim);
  for (int a = 0; a < dim; ++a) {
    const double m = m_of(a);
    const double perp = (s * (s + 1) - m * m) / 2;
    out(a, a) = 2.0 * model.h_field / n * m + pre * (model.jx * perp + model.jy * perp + model.jz * m * m) + shift;
    if (a + 2 < dim) {
      const double lower = m_of(a + 2);
      const double v = pre * (model.jx - model.jy) / 4 * raise(lower) * raise(lower + 1);
      out(a, a + 2) = out(a + 2, a) = v;
    }
  }
  return out;
}

std::array<std::vector<double>, 2> lmg_sector_spectrum(const ReducedSpinModel& model, int n, int two_s) {
  const Eigen::MatrixXd full = lmg_build(model, n, two_s);
  const int dim = two_s + 1;
  const int offset = (n - two_s) / 2;
  std::array<std::vector<double>, 2> out;
  for (int p = 0; p < 2; ++p) {
    std::vector<int> idx;
    for (int a = 0; a < dim; ++a)
      if ((offset + a) % 2 == p) idx.push_back(a);
    if (idx.empty()) continue;
    const auto k = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd sub(k, k);
    for (Eigen::Index r = 0; r < k; ++r)
      for (Eigen::Index c = 0; c < k; ++c) sub(r, c) = full(idx[r], idx[c]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sub, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NotConverged("LMG sector eigensolve failed");
    out[p].assign(es.eigenvalues().data(), es.eigenvalues().data() + k);
    std::sort(out[p].begin(), out[p].end(), std::greater<>());
  }
  return out;
}

std::uint64_t lmg_sector_multiplicity(int n, int two_s) {
  validate_sector(n, two_s);
  if (n > 62) throw CapExceeded("lmg_sector_multiplicity: n > 62 overflows");
  auto binom = [](int nn, int k) -> std::uint64_t {
    if (k < 0 || k > nn) return 0;
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(nn - k + i) / static_cast<std::uint64_t>(i);
    return r;
  };
  const int k = (n - two_s) / 2;
  return binom(n, k) - binom(n, k - 1);
}

LMGGapResult lmg_gap(const ReducedSpinModel& model, int n) {
  LMGGapResult res;
  res.n = n;
  const auto top = lmg_sector_spectrum(model, n, n);
  const auto next = lmg_sector_spectrum(model, n, n - 2);
  const std::uint64_t next_mult = static_cast<std::uint64_t>(n - 1);

  std::vector<LMGLevel> all;
  for (int p = 0; p < 2; ++p) {
    for (double v : top[p]) all.push_back({v, 1, n, p});
    for (double v : next[p]) all.push_back({v, next_mult, n - 2, p});
  }
  std::stable_sort(all.begin(), all.end(), [](const LMGLevel& a, const LMGLevel& b) { return a.value > b.value; });
  std::uint64_t seen = 0;
  for (const auto& l : all) {
    seen += l.multiplicity;
    if (seen >= 3) {
      res.lambda3 = l.value;
      break;
    }
  }
  res.gap = 1.0 - res.lambda3;

  int p = 0;
  if (top[0].size() < 2) {
    p = 1;
  } else if (top[1].size() >= 2) {
    p = top[1][1] > top[0][1] ? 1 : 0;
    res.doublet_splitting = std::abs(top[0][1] - top[1][1]);
  }
  const int other = 1 - p;
  if (!top[other].empty()) res.bookkeeping.push_back({top[other][0], 1, n, other});
  for (std::size_t i = 0; i < std::min<std::size_t>(4, top[p].size()); ++i) res.bookkeeping.push_back({top[p][i], 1, n, p});
  for (std::size_t i = 0; i < std::min<std::size_t>(3, next[p].size()); ++i)
    res.bookkeeping.push_back({next[p][i], next_mult, n - 2, p});
  std::stable_sort(res.bookkeeping.begin(), res.bookkeeping.end(),
                   [](const LMGLevel& a, const LMGLevel& b) { return a.value > b.value; });
  if (res.bookkeeping.size() >= 4) {
    res.fourth_value = res.bookkeeping[3].value;
    res.fourth_multiplicity = res.bookkeeping[3].multiplicity;
    res.fourth_two_s = res.bookkeeping[3].two_s;
  }
  return res;
}

AsymptoteFit lmg_asymptote(const ReducedSpinModel& model, const std::vector<int>& ns) {
  if (ns.size() < 2) throw DomainError("lmg_asymptote: need at least two sizes");
  AsymptoteFit fit;
  fit.ns = ns;
  Eigen::MatrixXd a(static_cast<Eigen::Index>(ns.size()), 2);
  Eigen::VectorXd y(static_cast<Eigen::Index>(ns.size()));
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const double ng = ns[i] * lmg_gap(model, ns[i]).gap;
    fit.n_gap.push_back(ng);
    a(static_cast<Eigen::Index>(i), 0) = 1.0;
    a(static_cast<Eigen::Index>(i), 1) = 1.0 / ns[i];
    y[static_cast<Eigen::Index>(i)] = ng;
  }
  const Eigen::Vector2d coef = a.colPivHouseholderQr().solve(y);
  fit.a = coef[0];
  fit.b = coef[1];
  return fit;
}

namespace {

struct ClassicalEnergy {
  const ReducedSpinModel& m;

  double value(double mu, double phi) const {
    const double c = m.jx * std::cos(phi) * std::cos(phi) + m.jy * std::sin(phi) * std::sin(phi);
    return m.h_field * mu + (1 - mu * mu) * c + m.jz * mu * mu + m.d;
  }
  Eigen::Vector2d gradient(double mu, double phi) const {
    const double c = m.jx * std::cos(phi) * std::cos(phi) + m.jy * std::sin(phi) * std::sin(phi);
    const double c1 = (m.jy - m.jx) * std::sin(2 * phi);
    return {m.h_field - 2 * mu * c + 2 * m.jz * mu, (1 - mu * mu) * c1};
  }
  Eigen::Matrix2d hessian(double mu, double phi) const {
    const double c = m.jx * std::cos(phi) * std::cos(phi) + m.jy * std::sin(phi) * std::sin(phi);
    const double c1 = (m.jy - m.jx) * std::sin(2 * phi);
    const double c2 = 2 * (m.jy - m.jx) * std::cos(2 * phi);
    Eigen::Matrix2d hs;
    hs << -2 * c + 2 * m.jz, -2 * mu * c1, -2 * mu * c1, (1 - mu * mu) * c2;
    return hs;
  }
};

}  // namespace

ClassicalGap lmg_classical_gap(const ReducedSpinModel& model) {
  const ClassicalEnergy e{model};
  constexpr int kGrid = 64;
  double best = -std::numeric_limits<double>::infinity();
  double mu = 0.0, phi = 0.0;
  for (int i = 0; i < kGrid; ++i) {
    const double m = -1.0 + 2.0 * (i + 0.5) / kGrid;
    for (int j = 0; j < kGrid; ++j) {
      const double f = 2.0 * kPi * j / kGrid;
      const double v = e.value(m, f);
      if (v > best) {
        best = v;
        mu = m;
        phi = f;
      }
    }
  }
  ClassicalGap out;
  for (int it = 0; it < 100; ++it) {
    const Eigen::Vector2d g = e.gradient(mu, phi);
    const Eigen::Matrix2d hs = e.hessian(mu, phi);
    const Eigen::Vector2d step = hs.fullPivLu().solve(g);
    if (!step.allFinite()) break;
    mu -= step[0];
    phi -= step[1];
    out.newton_steps = it + 1;
    if (step.norm() < 1e-15 || e.gradient(mu, phi).norm() < 1e-15) break;
  }
  if (std::abs(mu) >= 1.0 - 1e-8) throw NotConverged("classical maximum lies at a pole (mu = +-1)");
  if (e.gradient(mu, phi).norm() > 1e-10) throw NotConverged("classical maximum search did not converge");
  const Eigen::Matrix2d hs = e.hessian(mu, phi);
  const double det = hs.determinant();
  if (!(hs(0, 0) < 0.0) || det <= 1e-12) throw NotConverged("classical maximum is not a nondegenerate quadratic maximum");
  out.mu = mu;
  out.phi = std::fmod(phi + 2 * kPi, 2 * kPi);
  out.maximum = e.value(mu, phi);
  out.hessian_det = det;
  out.coefficient = 2.0 * std::sqrt(det);
  return out;
}

NumericGap xyz_chain_gap_numeric(const ReducedSpinModel& model, const Topology& topology,
                                 const DeflationOptions& options, std::size_t dense_cap) {
  const PairSumOperator op = build_reduced_chain(model, topology);
  NumericGap out;
  if (op.dim() <= std::min<std::size_t>(dense_cap, 4096)) {
    out.method = "dense";
    out.spectrum = dense_spectrum(op.to_dense(), {.cluster_tol = 1e-9});
    out.gap = out.spectrum.gap();
    out.top_doubly_degenerate = !out.spectrum.clusters.empty() && out.spectrum.clusters.front() == 2 &&
                                std::abs(out.spectrum.eigenvalues.front() - 1.0) <= 1e-9;
    return out;
  }
  out.method = "sparse";
  const auto fixed = reduced_fixed_vectors(model, topology.sites());
  double fixed_residual = 0.0;
  for (const auto& v : fixed) fixed_residual = std::max(fixed_residual, (op(v) - v).cwiseAbs().maxCoeff());
  out.top_doubly_degenerate = fixed_residual <= 1e-12;
  const LinearMap map{op.dim(), [&op](std::span<const double> x, std::span<double> y) { op.apply(x, y); }};
  out.spectrum = deflated_leading(map, fixed, 1, options);
  if (!out.spectrum.certified) {
    throw NotConverged("deflated iteration not certified after " + std::to_string(out.spectrum.iterations) +
                       " sweeps (residual " + std::to_string(out.spectrum.residuals.front()) + ")");
  }
  out.gap = 1.0 - std::abs(out.spectrum.eigenvalues.front());
  return out;
}

}  // namespace entgap
