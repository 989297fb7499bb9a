#pragma once

// Two-site fibre kernels. A vector over d^n entries (site 0 least significant)
// is split into d^(n-2) fibres of d^2 entries per site pair; each fibre is
// multiplied by the same d^2 x d^2 block. The parallel kernel distributes
// fibres over OpenMP threads; every output entry is written by exactly one
// fibre, so results are bit-identical to the serial reference.

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace entgap {

enum class Backend { Serial, Parallel };

struct SitePair {
  int first = 0;   // low digit of the two-site label (CNOT target)
  int second = 1;  // high digit (CNOT control)
  friend bool operator==(const SitePair&, const SitePair&) = default;
};

namespace kernels {

/// y += block * x restricted to the fibres of `pair`. Block rows/cols are
/// indexed by the local label a + d*b (a on pair.first, b on pair.second).
void two_site_accumulate_serial(int d, int n, SitePair pair, const Eigen::MatrixXd& block,
                                std::span<const double> x, std::span<double> y);
void two_site_accumulate_parallel(int d, int n, SitePair pair, const Eigen::MatrixXd& block,
                                  std::span<const double> x, std::span<double> y);

}  // namespace kernels

/// (1/L) sum over pairs of a common d^2 x d^2 block, applied without forming
/// the d^n x d^n matrix. L defaults to the number of pairs.
class PairSumOperator {
 public:
  PairSumOperator(int local_dim, int sites, std::vector<SitePair> pairs, Eigen::MatrixXd block,
                  double normalization = 0.0);

  int local_dim() const { return d_; }
  int sites() const { return n_; }
  std::size_t dim() const { return dim_; }
  const std::vector<SitePair>& pairs() const { return pairs_; }
  const Eigen::MatrixXd& block() const { return block_; }
  double normalization() const { return norm_; }

  void apply(std::span<const double> x, std::span<double> y, Backend backend = Backend::Parallel) const;
  Eigen::VectorXd operator()(const Eigen::VectorXd& x) const;

  /// Dense materialisation; refuses dimensions above max_dim.
  Eigen::MatrixXd to_dense(std::size_t max_dim = 4096) const;

 private:
  int d_;
  int n_;
  std::size_t dim_;
  std::vector<SitePair> pairs_;
  Eigen::MatrixXd block_;
  double norm_;
};

}  // namespace entgap
