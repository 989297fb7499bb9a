#include "entgap/kernels.hpp"

#include "entgap/errors.hpp"
#include "entgap/numeric.hpp"

#include <omp.h>

#include <array>
#include <string>

namespace entgap {

namespace kernels {
namespace {

struct FibreLayout {
  int d;
  std::size_t fibres;
  std::size_t low_stride;    // d^lo
  std::size_t mid_span;      // d^(hi-lo-1)
  std::size_t first_stride;  // d^pair.first
  std::size_t second_stride; // d^pair.second
  int lo;
  int hi;

  FibreLayout(int d_, int n, SitePair pair) : d(d_) {
    if (pair.first == pair.second || pair.first < 0 || pair.second < 0 || pair.first >= n || pair.second >= n) {
      throw DomainError("two-site kernel: invalid site pair");
    }
    lo = std::min(pair.first, pair.second);
    hi = std::max(pair.first, pair.second);
    fibres = ipow(d, n - 2);
    low_stride = ipow(d, lo);
    mid_span = ipow(d, hi - lo - 1);
    first_stride = ipow(d, pair.first);
    second_stride = ipow(d, pair.second);
  }

  // Inserts zero digits at positions lo and hi into the (n-2)-digit index r.
  std::size_t base(std::size_t r) const {
    const std::size_t below = r % low_stride;
    r /= low_stride;
    const std::size_t middle = r % mid_span;
    const std::size_t above = r / mid_span;
    return below + low_stride * d * (middle + mid_span * d * above);
  }
};

constexpr int kMaxLocal = 81;  // supports local dimension up to 9

inline void apply_fibre(const FibreLayout& lay, const Eigen::MatrixXd& block, std::size_t r,
                        std::span<const double> x, std::span<double> y) {
  const int d = lay.d;
  const int m = d * d;
  const std::size_t b0 = lay.base(r);
  std::array<std::size_t, kMaxLocal> idx;
  std::array<double, kMaxLocal> in;
  for (int b = 0; b < d; ++b) {
    for (int a = 0; a < d; ++a) {
      const int l = a + d * b;
      idx[l] = b0 + a * lay.first_stride + b * lay.second_stride;
      in[l] = x[idx[l]];
    }
  }
  for (int row = 0; row < m; ++row) {
    double acc = 0.0;
    for (int col = 0; col < m; ++col) acc += block(row, col) * in[col];
    y[idx[row]] += acc;
  }
}

void check_sizes(int d, int n, const Eigen::MatrixXd& block, std::span<const double> x, std::span<double> y) {
  if (d * d > kMaxLocal) throw InvalidDimension("two-site kernel: local dimension too large");
  if (block.rows() != d * d || block.cols() != d * d) throw InvalidDimension("two-site kernel: block shape mismatch");
  const std::size_t dim = ipow(d, n);
  if (x.size() != dim || y.size() != dim) throw InvalidDimension("two-site kernel: vector length mismatch");
}

}  // namespace

void two_site_accumulate_serial(int d, int n, SitePair pair, const Eigen::MatrixXd& block,
                                std::span<const double> x, std::span<double> y) {
  check_sizes(d, n, block, x, y);
  const FibreLayout lay(d, n, pair);
  for (std::size_t r = 0; r < lay.fibres; ++r) apply_fibre(lay, block, r, x, y);
}

void two_site_accumulate_parallel(int d, int n, SitePair pair, const Eigen::MatrixXd& block,
                                  std::span<const double> x, std::span<double> y) {
  check_sizes(d, n, block, x, y);
  const FibreLayout lay(d, n, pair);
  const auto fibres = static_cast<long long>(lay.fibres);
#pragma omp parallel for schedule(static) if (fibres >= 256)
  for (long long r = 0; r < fibres; ++r) apply_fibre(lay, block, static_cast<std::size_t>(r), x, y);
}

}  // namespace kernels

PairSumOperator::PairSumOperator(int local_dim, int sites, std::vector<SitePair> pairs, Eigen::MatrixXd block,
                                 double normalization)
    : d_(local_dim), n_(sites), pairs_(std::move(pairs)), block_(std::move(block)) {
  if (d_ < 2) throw InvalidDimension("PairSumOperator: local dimension must be >= 2");
  if (n_ < 1) throw InvalidDimension("PairSumOperator: need at least one site");
  if (block_.rows() != d_ * d_ || block_.cols() != d_ * d_) throw InvalidDimension("PairSumOperator: block shape");
  constexpr std::uint64_t kMaxDim = std::uint64_t{1} << 32;
  std::uint64_t dim = 1;
  for (int s = 0; s < n_; ++s) {
    dim *= static_cast<std::uint64_t>(d_);
    if (dim > kMaxDim) throw CapExceeded("PairSumOperator: state space exceeds 2^32 entries");
  }
  dim_ = dim;
  norm_ = normalization > 0.0 ? normalization : static_cast<double>(pairs_.size());
  if (norm_ <= 0.0) norm_ = 1.0;
}

void PairSumOperator::apply(std::span<const double> x, std::span<double> y, Backend backend) const {
  if (x.size() != dim_ || y.size() != dim_) throw InvalidDimension("PairSumOperator::apply: length mismatch");
  std::fill(y.begin(), y.end(), 0.0);
  for (const auto& p : pairs_) {
    if (backend == Backend::Serial) {
      kernels::two_site_accumulate_serial(d_, n_, p, block_, x, y);
    } else {
      kernels::two_site_accumulate_parallel(d_, n_, p, block_, x, y);
    }
  }
  const double scale = 1.0 / norm_;
  for (double& v : y) v *= scale;
}

Eigen::VectorXd PairSumOperator::operator()(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y(static_cast<Eigen::Index>(dim_));
  apply({x.data(), dim_}, {y.data(), dim_});
  return y;
}

Eigen::MatrixXd PairSumOperator::to_dense(std::size_t max_dim) const {
  if (dim_ > max_dim) {
    throw CapExceeded("dense materialisation of dimension " + std::to_string(dim_) + " exceeds cap " +
                      std::to_string(max_dim));
  }
  const auto n = static_cast<Eigen::Index>(dim_);
  Eigen::MatrixXd dense(n, n);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd col(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    e[j] = 1.0;
    apply({e.data(), dim_}, {col.data(), dim_}, Backend::Serial);
    dense.col(j) = col;
    e[j] = 0.0;
  }
  return dense;
}

}  // namespace entgap
