#include "entgap/pauli.hpp"

#include "entgap/errors.hpp"
#include "entgap/haar.hpp"
#include "entgap/numeric.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <complex>

namespace entgap {

using cd = std::complex<double>;

PauliIndex::PauliIndex(std::uint64_t value, int sites) : value_(value), sites_(sites) {
  if (sites < 0 || sites > 31) throw DomainError("PauliIndex: site count out of range");
  if (value >= ipow(4, sites)) throw DomainError("PauliIndex: value exceeds 4^n");
}

PauliIndex PauliIndex::from_digits(const std::vector<int>& digits) {
  std::uint64_t v = 0;
  for (std::size_t i = digits.size(); i-- > 0;) {
    if (digits[i] < 0 || digits[i] > 3) throw DomainError("PauliIndex: digit outside 0..3");
    v = 4 * v + static_cast<std::uint64_t>(digits[i]);
  }
  return PauliIndex(v, static_cast<int>(digits.size()));
}

int PauliIndex::digit(int site) const {
  if (site < 0 || site >= sites_) throw DomainError("PauliIndex: site out of range");
  return static_cast<int>((value_ >> (2 * site)) & 3U);
}

std::vector<int> PauliIndex::digits() const {
  std::vector<int> d(sites_);
  for (int i = 0; i < sites_; ++i) d[i] = digit(i);
  return d;
}

std::vector<int> PauliIndex::support() const {
  std::vector<int> s;
  for (int i = 0; i < sites_; ++i) {
    if (digit(i) != 0) s.push_back(i);
  }
  return s;
}

GateKind GateKind::generic_p(int m) {
  if (m < 2) throw InvalidDimension("GenericP requires m >= 2");
  return {GateTag::GenericP, m};
}

std::string GateKind::name() const {
  switch (tag) {
    case GateTag::HaarU4: return "u4";
    case GateTag::CNOT: return "cnot";
    case GateTag::XYgate: return "xy";
    case GateTag::GenericP: return "p" + std::to_string(m);
  }
  return "?";
}

GateKind GateKind::parse(const std::string& name) {
  if (name == "u4") return haar_u4();
  if (name == "cnot") return cnot();
  if (name == "xy") return xy();
  if (name.size() > 1 && name[0] == 'p' &&
      std::all_of(name.begin() + 1, name.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    const int m = std::stoi(name.substr(1));
    if (m == 16) return haar_u4();
    return generic_p(m);
  }
  throw UnsupportedGate("unknown gate '" + name + "'");
}

int TwoSiteModel::local_dim() const {
  const int k = static_cast<int>(std::lround(std::sqrt(static_cast<double>(m))));
  if (k * k != m) throw InvalidDimension("two-site dimension " + std::to_string(m) + " is not a square");
  return k;
}

TwoSiteModel build_P(int m) {
  if (m < 2) throw InvalidDimension("build_P: m must be >= 2");
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(m, m);
  p(0, 0) = 1.0;
  p.bottomRightCorner(m - 1, m - 1).setConstant(1.0 / (m - 1));
  GateKind g = m == 16 ? GateKind::haar_u4() : GateKind::generic_p(m);
  return {m, std::move(p), g};
}

Eigen::Matrix2cd pauli_matrix(int digit) {
  Eigen::Matrix2cd s;
  switch (digit) {
    case 0: s << 1, 0, 0, 1; break;
    case 1: s << 0, 1, 1, 0; break;
    case 2: s << 0, cd(0, -1), cd(0, 1), 0; break;
    case 3: s << 1, 0, 0, -1; break;
    default: throw DomainError("pauli_matrix: digit outside 0..3");
  }
  return s;
}

namespace {

Eigen::Matrix4cd kron2(const Eigen::Matrix2cd& high, const Eigen::Matrix2cd& low) {
  Eigen::Matrix4cd k;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 2; ++d) k(2 * a + c, 2 * b + d) = high(a, b) * low(c, d);
  return k;
}

const std::array<Eigen::Matrix4cd, 16>& pauli_table() {
  static const std::array<Eigen::Matrix4cd, 16> table = [] {
    std::array<Eigen::Matrix4cd, 16> t;
    for (int label = 0; label < 16; ++label) t[label] = kron2(pauli_matrix(label / 4), pauli_matrix(label % 4));
    return t;
  }();
  return table;
}

}  // namespace

Eigen::Matrix4cd two_qubit_pauli(int label) {
  if (label < 0 || label > 15) throw DomainError("two_qubit_pauli: label outside 0..15");
  return pauli_table()[label];
}

Eigen::Matrix4cd gate_matrix(const GateKind& gate) {
  Eigen::Matrix4cd w = Eigen::Matrix4cd::Zero();
  switch (gate.tag) {
    case GateTag::CNOT:
      // index = bit_t + 2 bit_c; the target flips when the control is set.
      for (int c = 0; c < 2; ++c)
        for (int t = 0; t < 2; ++t) w((t ^ c) + 2 * c, t + 2 * c) = 1.0;
      return w;
    case GateTag::XYgate:
      w(0, 0) = 1.0;
      w(3, 3) = 1.0;
      w(2, 1) = cd(0, -1);
      w(1, 2) = cd(0, -1);
      return w;
    case GateTag::HaarU4:
      throw UnsupportedGate("gate_matrix: Haar U(4) is a random ensemble, not a fixed matrix");
    case GateTag::GenericP:
      throw UnsupportedGate("gate_matrix: GenericP has no gate matrix");
  }
  throw UnsupportedGate("gate_matrix: unknown gate");
}

Permutation16 derive_conjugation_permutation(const Eigen::Matrix4cd& W) {
  constexpr double kTol = 1e-10;
  const auto& paulis = pauli_table();
  Permutation16 f{};
  for (int a = 0; a < 16; ++a) {
    const Eigen::Matrix4cd image = W * paulis[a] * W.adjoint();
    int hit = -1;
    for (int b = 0; b < 16; ++b) {
      const double overlap = std::abs((paulis[b] * image).trace()) / 4.0;
      if (std::abs(overlap - 1.0) <= kTol) {
        if (hit >= 0) throw NotPauliPreserving("label " + std::to_string(a) + " maps onto several Pauli products");
        hit = b;
      } else if (overlap > kTol) {
        throw NotPauliPreserving("label " + std::to_string(a) + " maps onto a superposition of Pauli products");
      }
    }
    if (hit < 0) throw NotPauliPreserving("label " + std::to_string(a) + " has no Pauli image");
    f[a] = hit;
  }
  return f;
}

Eigen::MatrixXd permutation_matrix(const Permutation16& f) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(16, 16);
  for (int a = 0; a < 16; ++a) d(f[a], a) = 1.0;
  return d;
}

TwoSiteModel build_two_site_model(const GateKind& gate) {
  switch (gate.tag) {
    case GateTag::HaarU4: return build_P(16);
    case GateTag::GenericP: return build_P(gate.m);
    case GateTag::CNOT:
    case GateTag::XYgate: {
      const Eigen::MatrixXd p4 = build_P(4).matrix;
      Eigen::MatrixXd local(16, 16);
      for (int r = 0; r < 16; ++r)
        for (int c = 0; c < 16; ++c) local(r, c) = p4(r / 4, c / 4) * p4(r % 4, c % 4);
      const auto f = derive_conjugation_permutation(gate_matrix(gate));
      return {16, permutation_matrix(f) * local, gate};
    }
  }
  throw UnsupportedGate("build_two_site_model: unknown gate");
}

double two_site_invariant_violation(const TwoSiteModel& model) {
  const auto& m = model.matrix;
  double worst = 0.0;
  worst = std::max(worst, (m.rowwise().sum().array() - 1.0).abs().maxCoeff());
  worst = std::max(worst, (m.colwise().sum().array() - 1.0).abs().maxCoeff());
  worst = std::max(worst, std::abs(m(0, 0) - 1.0));
  worst = std::max(worst, m.row(0).tail(model.m - 1).cwiseAbs().maxCoeff());
  worst = std::max(worst, m.col(0).tail(model.m - 1).cwiseAbs().maxCoeff());
  worst = std::max(worst, std::max(0.0, -m.minCoeff()));
  return worst;
}

namespace {

constexpr long kOracleChunk = 2048;

struct OracleSums {
  Eigen::Matrix<double, 16, 16> sum = Eigen::Matrix<double, 16, 16>::Zero();
  Eigen::Matrix<double, 16, 16> sum_sq = Eigen::Matrix<double, 16, 16>::Zero();
};

void accumulate_transfer(const Eigen::Matrix4cd& u, OracleSums& acc) {
  const auto& paulis = pauli_table();
  for (int a = 0; a < 16; ++a) {
    const Eigen::Matrix4cd image = u * paulis[a] * u.adjoint();
    for (int b = 0; b < 16; ++b) {
      // tr(sigma_b X) = sum_ij (sigma_b)_ji X_ij ; Pauli products are Hermitian.
      const double t = (paulis[b].conjugate().cwiseProduct(image)).sum().real() / 4.0;
      const double t2 = t * t;
      acc.sum(b, a) += t2;
      acc.sum_sq(b, a) += t2 * t2;
    }
  }
}

HaarAverageEstimate run_oracle(bool haar_u4, const Eigen::Matrix4cd& W, long samples, std::uint64_t seed) {
  if (samples < 1) throw DomainError("haar_average_oracle: samples must be >= 1");
  const long chunks = (samples + kOracleChunk - 1) / kOracleChunk;
  std::vector<OracleSums> partial(static_cast<std::size_t>(chunks));

#pragma omp parallel for schedule(static)
  for (long c = 0; c < chunks; ++c) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(c)));
    const long begin = c * kOracleChunk;
    const long end = std::min(samples, begin + kOracleChunk);
    OracleSums& acc = partial[static_cast<std::size_t>(c)];
    for (long s = begin; s < end; ++s) {
      Eigen::Matrix4cd u;
      if (haar_u4) {
        u = sample_haar_unitary(4, rng);
      } else {
        const Eigen::Matrix2cd v_first = sample_haar_unitary(2, rng);
        const Eigen::Matrix2cd v_second = sample_haar_unitary(2, rng);
        u = W * kron2(v_second, v_first);
      }
      accumulate_transfer(u, acc);
    }
  }

  OracleSums total;
  for (const auto& p : partial) {
    total.sum += p.sum;
    total.sum_sq += p.sum_sq;
  }
  const double n = static_cast<double>(samples);
  HaarAverageEstimate est;
  est.samples = samples;
  est.mean = total.sum / n;
  Eigen::MatrixXd second = total.sum_sq / n;
  Eigen::MatrixXd var = (second - est.mean.cwiseAbs2()).cwiseMax(0.0);
  if (samples > 1) var *= n / (n - 1.0);
  est.standard_error = (var / n).cwiseSqrt();
  return est;
}

}  // namespace

HaarAverageEstimate haar_average_oracle(const GateKind& gate, long samples, std::uint64_t seed) {
  if (gate.tag == GateTag::HaarU4) return run_oracle(true, Eigen::Matrix4cd::Identity(), samples, seed);
  if (gate.tag == GateTag::GenericP) throw UnsupportedGate("haar_average_oracle: GenericP has no circuit");
  return run_oracle(false, gate_matrix(gate), samples, seed);
}

HaarAverageEstimate haar_average_oracle(const Eigen::Matrix4cd& W, long samples, std::uint64_t seed) {
  return run_oracle(false, W, samples, seed);
}

}  // namespace entgap
