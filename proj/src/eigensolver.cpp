#include "entgap/eigensolver.hpp"

#include "entgap/errors.hpp"
#include "entgap/haar.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace entgap {

double SpectralResult::gap() const {
  if (eigenvalues.size() < 3) throw DomainError("gap: need at least three eigenvalues");
  return 1.0 - std::abs(eigenvalues[2]);
}

namespace {

bool modulus_before(const Complex& a, const Complex& b) {
  const double ma = std::abs(a), mb = std::abs(b);
  if (ma != mb) return ma > mb;
  if (a.real() != b.real()) return a.real() > b.real();
  return a.imag() > b.imag();
}

std::vector<std::size_t> order_by_modulus(const std::vector<Complex>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return modulus_before(v[i], v[j]); });
  return idx;
}

bool is_symmetric(const Eigen::MatrixXd& a) {
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  return (a - a.transpose()).cwiseAbs().maxCoeff() <= 1e-14 * scale;
}

}  // namespace

SpectralResult dense_spectrum(const Eigen::MatrixXd& a, const DenseOptions& options) {
  if (a.rows() != a.cols()) throw InvalidDimension("dense_spectrum: matrix must be square");
  if (static_cast<std::size_t>(a.rows()) > options.max_dim) {
    throw CapExceeded("dense_spectrum: dimension " + std::to_string(a.rows()) + " exceeds cap " +
                      std::to_string(options.max_dim));
  }
  SpectralResult res;
  std::vector<Complex> values;
  std::vector<double> residuals;
  if (is_symmetric(a)) {
    res.method = "dense_symmetric";
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
        a, options.compute_residuals ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NotConverged("dense_spectrum: self-adjoint solver failed");
    for (Eigen::Index i = 0; i < a.rows(); ++i) values.emplace_back(es.eigenvalues()[i], 0.0);
    if (options.compute_residuals) {
      const Eigen::MatrixXd& v = es.eigenvectors();
      const Eigen::MatrixXd r = a * v - v * es.eigenvalues().asDiagonal();
      for (Eigen::Index i = 0; i < a.rows(); ++i) residuals.push_back(r.col(i).norm() / v.col(i).norm());
    }
  } else {
    res.method = "dense_general";
    Eigen::EigenSolver<Eigen::MatrixXd> es(a, options.compute_residuals);
    if (es.info() != Eigen::Success) throw NotConverged("dense_spectrum: QR algorithm failed");
    for (Eigen::Index i = 0; i < a.rows(); ++i) values.push_back(es.eigenvalues()[i]);
    if (options.compute_residuals) {
      const Eigen::MatrixXcd v = es.eigenvectors();
      const Eigen::MatrixXcd r = a.cast<Complex>() * v - v * es.eigenvalues().asDiagonal();
      for (Eigen::Index i = 0; i < a.rows(); ++i) residuals.push_back(r.col(i).norm() / v.col(i).norm());
    }
  }
  const auto order = order_by_modulus(values);
  for (auto i : order) {
    res.eigenvalues.push_back(values[i]);
    if (!residuals.empty()) res.residuals.push_back(residuals[i]);
  }
  res.clusters = degeneracy_clusters(res.eigenvalues, options.cluster_tol);
  return res;
}

namespace {

Eigen::MatrixXd thin_q(const Eigen::MatrixXd& m) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  return qr.householderQ() * Eigen::MatrixXd::Identity(m.rows(), m.cols());
}

void project_out(const Eigen::MatrixXd& f, Eigen::MatrixXd& z) {
  if (f.cols() == 0) return;
  for (int pass = 0; pass < 2; ++pass) z -= f * (f.transpose() * z);
}

}  // namespace

SpectralResult deflated_leading(const LinearMap& a, const std::vector<Eigen::VectorXd>& known_fixed, int k,
                                const DeflationOptions& options) {
  const auto n = static_cast<Eigen::Index>(a.dim);
  if (k < 1) throw DomainError("deflated_leading: k must be >= 1");
  const auto f_count = static_cast<Eigen::Index>(known_fixed.size());
  const Eigen::Index room = n - f_count;
  if (room < k) throw DomainError("deflated_leading: not enough dimensions left after deflation");
  const Eigen::Index p = std::min<Eigen::Index>(room, k + std::max(0, options.extra_block));

  Eigen::MatrixXd f(n, f_count);
  for (Eigen::Index j = 0; j < f_count; ++j) {
    if (known_fixed[j].size() != n) throw InvalidDimension("deflated_leading: fixed vector length mismatch");
    f.col(j) = known_fixed[j];
  }
  if (f_count > 0) f = thin_q(f);

  Rng rng(options.seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd q(n, p);
  for (Eigen::Index j = 0; j < p; ++j)
    for (Eigen::Index i = 0; i < n; ++i) q(i, j) = normal(rng);
  project_out(f, q);
  q = thin_q(q);

  SpectralResult res;
  res.method = "deflated_block_iteration";
  res.certified = false;
  Eigen::MatrixXd z(n, p);
  std::vector<Complex> previous;

  for (int it = 1; it <= options.max_iter; ++it) {
    for (Eigen::Index j = 0; j < p; ++j) {
      a.apply({q.col(j).data(), a.dim}, {z.col(j).data(), a.dim});
    }
    project_out(f, z);
    const Eigen::MatrixXd h = q.transpose() * z;
    Eigen::EigenSolver<Eigen::MatrixXd> es(h, true);
    if (es.info() != Eigen::Success) throw NotConverged("deflated_leading: Ritz eigensolve failed");
    std::vector<Complex> theta(es.eigenvalues().data(), es.eigenvalues().data() + p);
    const auto order = order_by_modulus(theta);

    std::vector<Complex> top;
    std::vector<double> resid;
    const Eigen::MatrixXcd qc = q.cast<Complex>();
    const Eigen::MatrixXcd zc = z.cast<Complex>();
    for (int i = 0; i < k; ++i) {
      const auto idx = static_cast<Eigen::Index>(order[i]);
      const Eigen::VectorXcd y = es.eigenvectors().col(idx);
      const Eigen::VectorXcd v = qc * y;
      const Eigen::VectorXcd r = zc * y - theta[order[i]] * v;
      top.push_back(theta[order[i]]);
      resid.push_back(r.norm() / v.norm());
    }

    bool steady = previous.size() == top.size();
    for (std::size_t i = 0; steady && i < top.size(); ++i) {
      steady = std::abs(top[i] - previous[i]) <= options.change_tol * std::max(1.0, std::abs(top[i]));
    }
    const bool small = std::all_of(resid.begin(), resid.end(), [&](double r) { return r <= options.tol; });

    res.eigenvalues = top;
    res.residuals = resid;
    res.iterations = it;
    if (steady && small) {
      res.certified = true;
      break;
    }
    previous = std::move(top);
    q = thin_q(z);
  }
  res.clusters = degeneracy_clusters(res.eigenvalues, options.cluster_tol);
  return res;
}

std::vector<ValueCluster> cluster_values(std::span<const Complex> values, double tol) {
  if (tol <= 0.0) throw DomainError("cluster_values: tol must be positive");
  const std::size_t n = values.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  std::vector<std::size_t> by_real(n);
  std::iota(by_real.begin(), by_real.end(), 0);
  std::sort(by_real.begin(), by_real.end(), [&](std::size_t i, std::size_t j) { return values[i].real() < values[j].real(); });
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      const auto i = by_real[a], j = by_real[b];
      if (values[j].real() - values[i].real() > tol) break;
      if (std::abs(values[i] - values[j]) <= tol) parent[find(i)] = find(j);
    }
  }
  std::vector<Complex> sum(n, 0.0);
  std::vector<std::size_t> count(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = find(i);
    sum[r] += values[i];
    ++count[r];
  }
  std::vector<ValueCluster> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (count[i] > 0) out.push_back({sum[i] / static_cast<double>(count[i]), count[i]});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const ValueCluster& x, const ValueCluster& y) { return modulus_before(x.centroid, y.centroid); });
  return out;
}

std::vector<std::size_t> degeneracy_clusters(std::span<const Complex> values, double tol) {
  std::vector<std::size_t> sizes;
  for (const auto& c : cluster_values(values, tol)) sizes.push_back(c.size);
  return sizes;
}

MultisetComparison compare_spectra(std::span<const Complex> a, std::span<const Complex> b, double tol,
                                   double cluster_tol) {
  MultisetComparison cmp;
  if (a.size() != b.size()) {
    cmp.detail = "sizes differ: " + std::to_string(a.size()) + " vs " + std::to_string(b.size());
    return cmp;
  }
  const auto ca = cluster_values(a, cluster_tol);
  const auto cb = cluster_values(b, cluster_tol);
  std::vector<bool> used(cb.size(), false);
  cmp.equal = true;
  for (const auto& c : ca) {
    std::size_t best = cb.size();
    double best_dist = 0.0;
    for (std::size_t j = 0; j < cb.size(); ++j) {
      if (used[j] || cb[j].size != c.size) continue;
      const double dist = std::abs(cb[j].centroid - c.centroid);
      if (best == cb.size() || dist < best_dist) {
        best = j;
        best_dist = dist;
      }
    }
    if (best == cb.size()) {
      cmp.equal = false;
      cmp.detail = "no partner with multiplicity " + std::to_string(c.size) + " for eigenvalue (" +
                   std::to_string(c.centroid.real()) + ", " + std::to_string(c.centroid.imag()) + ")";
      return cmp;
    }
    used[best] = true;
    cmp.max_deviation = std::max(cmp.max_deviation, best_dist);
  }
  if (cmp.max_deviation > tol) {
    cmp.equal = false;
    cmp.detail = "cluster centroids deviate by " + std::to_string(cmp.max_deviation);
  }
  return cmp;
}

std::vector<Complex> to_complex(std::span<const double> values) {
  return {values.begin(), values.end()};
}

}  // namespace entgap
