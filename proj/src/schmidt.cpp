#include "entgap/schmidt.hpp"

#include "entgap/errors.hpp"
#include "entgap/numeric.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <string>

namespace entgap {

Eigen::MatrixXd SchmidtDecomposition::reconstruct() const {
  const int d = local_dim;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d * d, d * d);
  for (int j = 0; j < rank(); ++j)
    for (int cp = 0; cp < d; ++cp)
      for (int c = 0; c < d; ++c)
        for (int tp = 0; tp < d; ++tp)
          for (int t = 0; t < d; ++t) m(tp + d * cp, t + d * c) += kappa[j] * a[j](cp, c) * b[j](tp, t);
  return m;
}

SchmidtDecomposition operator_schmidt(const TwoSiteModel& model, double cutoff) {
  const int d = model.local_dim();
  Eigen::MatrixXd r(d * d, d * d);
  for (int cp = 0; cp < d; ++cp)
    for (int c = 0; c < d; ++c)
      for (int tp = 0; tp < d; ++tp)
        for (int t = 0; t < d; ++t) r(cp * d + c, tp * d + t) = model.matrix(tp + d * cp, t + d * c);

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(r, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SchmidtDecomposition dec;
  dec.local_dim = d;
  const auto& s = svd.singularValues();
  for (Eigen::Index j = 0; j < s.size() && s[j] > cutoff; ++j) {
    Eigen::MatrixXd a(d, d), b(d, d);
    for (int x = 0; x < d; ++x)
      for (int y = 0; y < d; ++y) {
        a(x, y) = svd.matrixU()(x * d + y, j);
        b(x, y) = svd.matrixV()(x * d + y, j);
      }
    Eigen::Index row = 0, col = 0;
    a.cwiseAbs().maxCoeff(&row, &col);
    if (a(row, col) < 0.0) {
      a = -a;
      b = -b;
    }
    dec.kappa.push_back(s[j]);
    dec.a.push_back(std::move(a));
    dec.b.push_back(std::move(b));
  }
  return dec;
}

namespace {

KernelBasis null_space(const std::vector<Eigen::MatrixXd>& factors, int d, double threshold) {
  Eigen::MatrixXd stacked(static_cast<Eigen::Index>(factors.size()) * d, d);
  for (std::size_t j = 0; j < factors.size(); ++j) stacked.middleRows(static_cast<Eigen::Index>(j) * d, d) = factors[j];
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(stacked, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  KernelBasis k;
  for (int j = 0; j < d; ++j) {
    if (j >= s.size() || s[j] <= threshold) k.vectors.push_back(svd.matrixV().col(j));
  }
  return k;
}

}  // namespace

KernelBasis common_kernel(const SchmidtDecomposition& dec, double threshold) {
  if (dec.rank() == 0) throw DomainError("common_kernel: empty decomposition");
  auto k = null_space(dec.a, dec.local_dim, threshold);
  if (k.dim() == 0) throw ReductionUnavailable("Schmidt factors have no common kernel");
  return k;
}

double kernel_violation(const std::vector<Eigen::MatrixXd>& factors, const KernelBasis& kernel) {
  double worst = 0.0;
  for (const auto& f : factors)
    for (const auto& v : kernel.vectors) worst = std::max(worst, (f * v).cwiseAbs().maxCoeff());
  return worst;
}

Eigen::Matrix4d rotation_U() {
  const double r3 = std::sqrt(3.0), r6 = std::sqrt(6.0), r2 = std::sqrt(2.0);
  Eigen::Matrix4d u;
  u << r3 / 2, 1 / (2 * r3), 1 / (2 * r3), 1 / (2 * r3),
      -0.5, 0.5, 0.5, 0.5,
      0.0, -2 / r6, 1 / r6, 1 / r6,
      0.0, 0.0, -1 / r2, 1 / r2;
  return u;
}

double subspace_angle(const std::vector<Eigen::VectorXd>& basis, const std::vector<Eigen::VectorXd>& reference) {
  if (basis.empty() || reference.empty()) throw DomainError("subspace_angle: empty basis");
  const auto dim = basis.front().size();
  Eigen::MatrixXd b(dim, static_cast<Eigen::Index>(basis.size()));
  for (std::size_t j = 0; j < basis.size(); ++j) b.col(static_cast<Eigen::Index>(j)) = basis[j];
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(b);
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(dim, b.cols());
  double worst = 0.0;
  for (const auto& r : reference) {
    const Eigen::VectorXd u = r.normalized();
    const double off = (u - q * (q.transpose() * u)).norm();
    worst = std::max(worst, std::asin(std::min(1.0, off)));
  }
  return worst;
}

Eigen::Matrix4d xyz_block(double d, double jx, double jy, double jz, double h_field) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  m(0, 0) = d + jz + h_field;
  m(3, 3) = d + jz - h_field;
  m(1, 1) = m(2, 2) = d - jz;
  m(0, 3) = m(3, 0) = jx - jy;
  m(1, 2) = m(2, 1) = jx + jy;
  return m;
}

namespace {

constexpr double kFormTol = 1e-10;

void fill_parameters(ReducedSpinModel& r) {
  const auto& b = r.block;
  r.h_field = (b(0, 0) - b(3, 3)) / 2;
  const double d_plus = (b(0, 0) + b(3, 3)) / 2;
  const double d_minus = b(1, 1);
  r.d = (d_plus + d_minus) / 2;
  r.jz = (d_plus - d_minus) / 2;
  r.jx = (b(1, 2) + b(0, 3)) / 2;
  r.jy = (b(1, 2) - b(0, 3)) / 2;
  r.scale = r.jx + r.jy;
  if (std::abs(r.scale) < kFormTol) throw ReductionUnavailable("reduced block has no XY coupling");
  r.gamma = (r.jx - r.jy) / r.scale;
  r.h = r.h_field / r.scale;
  r.h_xy_form = std::abs(r.jz) <= kFormTol;
  r.form_residual = (b - xyz_block(r.d, r.jx, r.jy, r.jz, r.h_field)).cwiseAbs().maxCoeff();
  if (r.form_residual > kFormTol) {
    throw ReductionUnavailable("reduced block is not of XYZ form (residual " + std::to_string(r.form_residual) + ")");
  }
}

}  // namespace

ReducedSpinModel reduce_two_site(const TwoSiteModel& model) {
  if (model.local_dim() != 4) throw ReductionUnavailable("reduce_two_site: expects a 16x16 two-qubit model");
  const auto dec = operator_schmidt(model);
  const auto kernel = common_kernel(dec);
  if (kernel.dim() != 2) {
    throw ReductionUnavailable("common kernel has dimension " + std::to_string(kernel.dim()) + ", need 2");
  }
  if (kernel_violation(dec.b, kernel) > kFormTol) {
    throw ReductionUnavailable("first-site factors do not share the kernel");
  }
  const Eigen::Matrix4d u = rotation_U();
  const std::vector<Eigen::VectorXd> rows = {u.row(2).transpose(), u.row(3).transpose()};
  if (subspace_angle(kernel.vectors, rows) > kFormTol) {
    throw ReductionUnavailable("common kernel differs from the span of the fixed rotation");
  }

  ReducedSpinModel r;
  r.gate = model.gate.name();
  r.schmidt_rank = dec.rank();
  r.block.setZero();
  for (int j = 0; j < dec.rank(); ++j) {
    const Eigen::Matrix4d a = u * dec.a[j] * u.transpose();
    const Eigen::Matrix4d b = u * dec.b[j] * u.transpose();
    const double leak = std::max(a.rightCols<2>().cwiseAbs().maxCoeff(), b.rightCols<2>().cwiseAbs().maxCoeff());
    if (leak > kFormTol) throw ReductionUnavailable("rotated factors act on kernel directions");
    r.lower_left_norm = std::max({r.lower_left_norm, a.bottomLeftCorner<2, 2>().cwiseAbs().maxCoeff(),
                                  b.bottomLeftCorner<2, 2>().cwiseAbs().maxCoeff()});
    for (int cp = 0; cp < 2; ++cp)
      for (int c = 0; c < 2; ++c)
        for (int tp = 0; tp < 2; ++tp)
          for (int t = 0; t < 2; ++t) r.block(tp + 2 * cp, t + 2 * c) += dec.kappa[j] * a(cp, c) * b(tp, t);
  }
  fill_parameters(r);
  r.local_dim = 4;
  r.kernel_dim = 2;
  r.fixed_identity = u.col(0).head<2>();
  r.fixed_uniform = (u * Eigen::Vector4d::Ones()).head<2>();
  return r;
}

ReducedSpinModel reduce_generic_P(int k) {
  if (k != 2 && k != 3 && k != 4 && k != 9) {
    throw ReductionUnavailable("reduce_generic_P: local dimension " + std::to_string(k) +
                               " unsupported (k in {2, 3, 4, 9})");
  }
  const TwoSiteModel p = build_P(k * k);
  const double theta = std::atan(std::sqrt(static_cast<double>(k - 1))) / 2;
  Eigen::VectorXd e0 = Eigen::VectorXd::Zero(k);
  e0[0] = 1.0;
  Eigen::VectorXd nh = Eigen::VectorXd::Ones(k);
  nh[0] = 0.0;
  nh.normalize();
  Eigen::MatrixXd b(2, k);
  b.row(0) = (std::cos(theta) * e0 + std::sin(theta) * nh).transpose();
  b.row(1) = (-std::sin(theta) * e0 + std::cos(theta) * nh).transpose();

  Eigen::MatrixXd kk(4, k * k);
  for (int c = 0; c < 2; ++c)
    for (int t = 0; t < 2; ++t)
      for (int bb = 0; bb < k; ++bb)
        for (int a = 0; a < k; ++a) kk(t + 2 * c, a + k * bb) = b(t, a) * b(c, bb);

  ReducedSpinModel r;
  r.gate = "p" + std::to_string(k * k);
  r.schmidt_rank = operator_schmidt(p).rank();
  r.block = kk * p.matrix * kk.transpose();
  fill_parameters(r);
  r.local_dim = k;
  r.kernel_dim = k - 2;
  r.fixed_identity = b * e0;
  r.fixed_uniform = b * Eigen::VectorXd::Ones(k);
  return r;
}

ReducedSpinModel reduce_gate(const GateKind& gate) {
  if (gate.tag == GateTag::GenericP) {
    const int k = static_cast<int>(std::lround(std::sqrt(static_cast<double>(gate.m))));
    if (k * k != gate.m) throw ReductionUnavailable("P_m reduction needs m to be a perfect square");
    return reduce_generic_P(k);
  }
  return reduce_two_site(build_two_site_model(gate));
}

PairSumOperator build_reduced_chain(const ReducedSpinModel& model, const Topology& topology) {
  return PairSumOperator(2, topology.sites(), topology.pairs(), Eigen::MatrixXd(model.block));
}

std::vector<Eigen::VectorXd> reduced_fixed_vectors(const ReducedSpinModel& model, int n) {
  std::vector<Eigen::VectorXd> out;
  for (const Eigen::Vector2d& loc : {model.fixed_identity, model.fixed_uniform}) {
    Eigen::VectorXd v(Eigen::Index{1} << n);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      double p = 1.0;
      for (int s = 0; s < n; ++s) p *= loc[(i >> s) & 1];
      v[i] = p;
    }
    out.push_back(v.normalized());
  }
  return out;
}

std::vector<Complex> subchain_spectrum_union(const ReducedSpinModel& model, const Topology& topology,
                                             int max_sites) {
  const int n = topology.sites();
  if (n > max_sites) {
    throw CapExceeded("subchain_spectrum_union: n = " + std::to_string(n) + " exceeds cap " +
                      std::to_string(max_sites));
  }
  const double L = topology.pair_count();
  const Eigen::MatrixXd block = model.block;
  std::vector<Complex> out;
  out.reserve(ipow(static_cast<std::uint64_t>(2 + model.kernel_dim), n));
  for (unsigned mask = 0; mask < (1U << n); ++mask) {
    std::vector<int> compact(n, -1);
    int kept = 0;
    for (int s = 0; s < n; ++s)
      if (mask >> s & 1U) compact[s] = kept++;
    const std::size_t mult = ipow(static_cast<std::uint64_t>(model.kernel_dim), n - kept);
    if (mult == 0) continue;
    std::vector<SitePair> inside;
    for (const auto& p : topology.pairs())
      if (compact[p.first] >= 0 && compact[p.second] >= 0) inside.push_back({compact[p.first], compact[p.second]});

    std::vector<Complex> values;
    if (kept == 0) {
      values.assign(1, 0.0);
    } else if (inside.empty()) {
      values.assign(std::size_t{1} << kept, 0.0);
    } else {
      const PairSumOperator op(2, kept, inside, block, L);
      values = dense_spectrum(op.to_dense(), {.compute_residuals = false}).eigenvalues;
    }
    for (const auto& v : values) out.insert(out.end(), mult, v);
  }
  return out;
}

}  // namespace entgap
