#include "entgap/simulator.hpp"

#include "entgap/eigensolver.hpp"
#include "entgap/errors.hpp"
#include "entgap/numeric.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <random>

namespace entgap {

StateVector StateVector::product(const std::vector<int>& axes) {
  if (axes.empty()) throw DomainError("StateVector::product: need at least one site");
  if (axes.size() > 24) throw CapExceeded("StateVector::product: too many qubits");
  const double r = M_SQRT1_2;
  Eigen::VectorXcd psi = Eigen::VectorXcd::Ones(1);
  for (std::size_t s = 0; s < axes.size(); ++s) {
    Eigen::Vector2cd local;
    switch (axes[s]) {
      case 1: local << r, r; break;
      case 2: local << r, Complex(0.0, r); break;
      case 3: local << 1.0, 0.0; break;
      default: throw DomainError("StateVector::product: axis must be 1 (x), 2 (y) or 3 (z)");
    }
    // site s becomes bit s, i.e. the new most significant factor
    Eigen::VectorXcd next(psi.size() * 2);
    next.head(psi.size()) = local[0] * psi;
    next.tail(psi.size()) = local[1] * psi;
    psi = std::move(next);
  }
  return {static_cast<int>(axes.size()), std::move(psi)};
}

StateVector StateVector::all_zero(int n) { return product(std::vector<int>(n, 3)); }

ProtocolSpec ProtocolSpec::make(const GateKind& gate, const Topology& topology, std::vector<int> subsystem, int steps,
                                int trajectories, std::uint64_t seed) {
  const ProtocolKind kind = gate.tag == GateTag::HaarU4 ? ProtocolKind::HaarTwoQubit : ProtocolKind::FixedGatePlusLocalHaar;
  return {gate, topology, kind, steps, trajectories, seed, std::move(subsystem)};
}

void validate(const ProtocolSpec& spec) {
  if (spec.kind == ProtocolKind::HaarTwoQubit && spec.gate.tag != GateTag::HaarU4) {
    throw DomainError("Haar two-qubit protocol requires the u4 gate");
  }
  if (spec.kind == ProtocolKind::FixedGatePlusLocalHaar && spec.gate.tag != GateTag::CNOT &&
      spec.gate.tag != GateTag::XYgate) {
    throw DomainError("fixed-gate protocol requires cnot or xy");
  }
  if (spec.steps < 0) throw DomainError("steps must be >= 0");
  if (spec.trajectories < 1) throw DomainError("trajectories must be >= 1");
  if (spec.topology.sites() > 20) throw CapExceeded("statevector simulation limited to n <= 20");
  validate_subsystem(spec.topology.sites(), spec.subsystem);
}

void apply_two_qubit(Eigen::VectorXcd& psi, int n, SitePair pair, const Eigen::Matrix4cd& u) {
  if (pair.first == pair.second || pair.first < 0 || pair.second < 0 || pair.first >= n || pair.second >= n) {
    throw DomainError("apply_two_qubit: invalid pair");
  }
  const std::size_t b1 = std::size_t{1} << pair.first;
  const std::size_t b2 = std::size_t{1} << pair.second;
  const auto dim = static_cast<std::size_t>(psi.size());
  for (std::size_t i = 0; i < dim; ++i) {
    if (i & (b1 | b2)) continue;
    const std::size_t idx[4] = {i, i | b1, i | b2, i | b1 | b2};
    const Eigen::Vector4cd in(psi[idx[0]], psi[idx[1]], psi[idx[2]], psi[idx[3]]);
    const Eigen::Vector4cd out = u * in;
    for (int k = 0; k < 4; ++k) psi[idx[k]] = out[k];
  }
}

Eigen::Matrix4cd dressed_gate(const Eigen::Matrix4cd& w, const Eigen::Matrix2cd& v_first, const Eigen::Matrix2cd& v_second) {
  Eigen::Matrix4cd k;
  for (int c1 = 0; c1 < 2; ++c1)
    for (int t1 = 0; t1 < 2; ++t1)
      for (int c2 = 0; c2 < 2; ++c2)
        for (int t2 = 0; t2 < 2; ++t2) k(t1 + 2 * c1, t2 + 2 * c2) = v_second(c1, c2) * v_first(t1, t2);
  return w * k;
}

double state_purity(const Eigen::VectorXcd& psi, int n, const std::vector<int>& subsystem) {
  const auto a = validate_subsystem(n, subsystem);
  std::vector<bool> in_a(n, false);
  for (int s : a) in_a[s] = true;
  const int na = static_cast<int>(a.size());
  const Eigen::Index da = Eigen::Index{1} << na;
  const Eigen::Index db = Eigen::Index{1} << (n - na);
  Eigen::MatrixXcd m(da, db);
  for (Eigen::Index i = 0; i < psi.size(); ++i) {
    Eigen::Index ia = 0, ib = 0;
    int ka = 0, kb = 0;
    for (int s = 0; s < n; ++s) {
      const Eigen::Index bit = (i >> s) & 1;
      if (in_a[s]) ia |= bit << ka++;
      else ib |= bit << kb++;
    }
    m(ia, ib) = psi[i];
  }
  const Eigen::MatrixXcd g = da <= db ? Eigen::MatrixXcd(m * m.adjoint()) : Eigen::MatrixXcd(m.adjoint() * m);
  return g.squaredNorm();
}

WeightVector pauli_weights(const StateVector& state) {
  const int n = state.n;
  if (n > 8) throw CapExceeded("pauli_weights: n > 8");
  const std::size_t dim = std::size_t{1} << n;
  const std::size_t labels = ipow(4, n);
  WeightVector x(labels);
  for (std::size_t alpha = 0; alpha < labels; ++alpha) {
    std::size_t flip = 0;
    for (int s = 0; s < n; ++s) {
      const unsigned d = (alpha >> (2 * s)) & 3U;
      if (d == 1 || d == 2) flip |= std::size_t{1} << s;
    }
    Complex acc = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      Complex phase = 1.0;
      for (int s = 0; s < n; ++s) {
        const unsigned d = (alpha >> (2 * s)) & 3U;
        const bool bit = (i >> s) & 1U;
        if (d == 2) phase *= bit ? Complex(0.0, -1.0) : Complex(0.0, 1.0);
        else if (d == 3 && bit) phase = -phase;
      }
      acc += std::conj(state.amplitudes[static_cast<Eigen::Index>(i ^ flip)]) * phase *
             state.amplitudes[static_cast<Eigen::Index>(i)];
    }
    x[alpha] = acc.real() * acc.real();
  }
  return x;
}

namespace {

Eigen::Matrix4cd draw_step_unitary(const ProtocolSpec& spec, const Eigen::Matrix4cd& w, Rng& rng) {
  if (spec.kind == ProtocolKind::HaarTwoQubit) return sample_haar_unitary(4, rng);
  const Eigen::Matrix2cd v_first = sample_haar_unitary(2, rng);
  const Eigen::Matrix2cd v_second = sample_haar_unitary(2, rng);
  return dressed_gate(w, v_first, v_second);
}

void guard_norm(Eigen::VectorXcd& psi, TrajectoryDiagnostics& diag) {
  const double drift = std::abs(psi.norm() - 1.0);
  diag.max_norm_drift = std::max(diag.max_norm_drift, drift);
  if (drift > 1e-6) throw NotConverged("trajectory aborted: norm drift " + std::to_string(drift));
  if (drift > 1e-9) {
    psi.normalize();
    ++diag.renormalizations;
  }
}

template <class Record>
void simulate(const ProtocolSpec& spec, const StateVector& initial, std::uint64_t seed, TrajectoryDiagnostics& diag,
              Eigen::VectorXcd& psi, Record record) {
  const int n = spec.topology.sites();
  if (initial.n != n) throw InvalidDimension("initial state has the wrong number of qubits");
  const Eigen::Matrix4cd w =
      spec.kind == ProtocolKind::FixedGatePlusLocalHaar ? gate_matrix(spec.gate) : Eigen::Matrix4cd::Identity();
  Rng rng(seed);
  std::uniform_int_distribution<int> pick(0, spec.topology.pair_count() - 1);
  psi = initial.amplitudes;
  record(0, psi);
  for (int t = 1; t <= spec.steps; ++t) {
    const SitePair pair = spec.topology.pairs()[pick(rng)];
    apply_two_qubit(psi, n, pair, draw_step_unitary(spec, w, rng));
    guard_norm(psi, diag);
    record(t, psi);
  }
}

}  // namespace

PurityTrace run_trajectory(const ProtocolSpec& spec, const StateVector& initial, std::uint64_t trajectory_seed,
                           TrajectoryDiagnostics* diagnostics) {
  validate(spec);
  const int n = spec.topology.sites();
  PurityTrace trace;
  trace.n = n;
  trace.n_a = static_cast<int>(validate_subsystem(n, spec.subsystem).size());
  trace.gate = spec.gate.name();
  trace.topology = spec.topology.name();
  TrajectoryDiagnostics diag;
  Eigen::VectorXcd psi;
  simulate(spec, initial, trajectory_seed, diag, psi, [&](int t, const Eigen::VectorXcd& v) {
    trace.times.push_back(t);
    trace.values.push_back(state_purity(v, n, spec.subsystem));
  });
  if (diagnostics) *diagnostics = diag;
  return trace;
}

EnsembleTrace ensemble_purity(const ProtocolSpec& spec, const StateVector& initial) {
  validate(spec);
  const int n = spec.topology.sites();
  const int r_count = spec.trajectories;
  EnsembleTrace out;
  out.n = n;
  out.n_a = static_cast<int>(validate_subsystem(n, spec.subsystem).size());
  out.gate = spec.gate.name();
  out.topology = spec.topology.name();
  out.trajectories = r_count;
  out.seed = spec.master_seed;
  out.samples.assign(r_count, {});
  std::vector<TrajectoryDiagnostics> diags(r_count);
  std::vector<std::string> errors(r_count);

#pragma omp parallel for schedule(dynamic, 8)
  for (int r = 0; r < r_count; ++r) {
    try {
      const auto tr = run_trajectory(spec, initial, derive_seed(spec.master_seed, static_cast<std::uint64_t>(r)), &diags[r]);
      out.samples[r] = tr.values;
    } catch (const std::exception& e) {
      errors[r] = e.what();
    }
  }
  for (int r = 0; r < r_count; ++r) {
    if (!errors[r].empty()) throw NotConverged("trajectory " + std::to_string(r) + ": " + errors[r]);
    out.diagnostics.renormalizations += diags[r].renormalizations;
    out.diagnostics.max_norm_drift = std::max(out.diagnostics.max_norm_drift, diags[r].max_norm_drift);
  }

  for (int t = 0; t <= spec.steps; ++t) {
    double sum = 0.0;
    for (int r = 0; r < r_count; ++r) sum += out.samples[r][t];
    const double mean = sum / r_count;
    double ss = 0.0;
    for (int r = 0; r < r_count; ++r) ss += (out.samples[r][t] - mean) * (out.samples[r][t] - mean);
    out.times.push_back(t);
    out.mean.push_back(mean);
    out.standard_error.push_back(r_count > 1 ? std::sqrt(ss / (r_count - 1) / r_count) : 0.0);
  }
  return out;
}

WeightVector ensemble_pauli_weights(const ProtocolSpec& spec, const StateVector& initial) {
  validate(spec);
  const int r_count = spec.trajectories;
  std::vector<WeightVector> per(r_count);
  std::vector<std::string> errors(r_count);
#pragma omp parallel for schedule(dynamic, 8)
  for (int r = 0; r < r_count; ++r) {
    try {
      TrajectoryDiagnostics diag;
      Eigen::VectorXcd psi;
      simulate(spec, initial, derive_seed(spec.master_seed, static_cast<std::uint64_t>(r)), diag, psi,
               [](int, const Eigen::VectorXcd&) {});
      per[r] = pauli_weights({initial.n, psi});
    } catch (const std::exception& e) {
      errors[r] = e.what();
    }
  }
  WeightVector mean(per.empty() ? 0 : ipow(4, initial.n), 0.0);
  for (int r = 0; r < r_count; ++r) {
    if (!errors[r].empty()) throw NotConverged("trajectory " + std::to_string(r) + ": " + errors[r]);
    for (std::size_t a = 0; a < mean.size(); ++a) mean[a] += per[r][a];
  }
  for (double& v : mean) v /= r_count;
  return mean;
}

double DecayFit::combined_sigma() const { return std::sqrt(sigma * sigma + window_bias * window_bias); }

bool DecayFit::agrees(double n_sigma) const { return std::abs(rate - expected) <= n_sigma * combined_sigma(); }

namespace {

double log_slope(const std::vector<double>& curve, double asymptote, int t_min, int t_max) {
  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  const int count = t_max - t_min + 1;
  for (int t = t_min; t <= t_max; ++t) {
    const double y = std::log(curve[t] - asymptote);
    st += t;
    sy += y;
    stt += static_cast<double>(t) * t;
    sty += t * y;
  }
  return (count * sty - st * sy) / (count * stt - st * st);
}

}  // namespace

DecayFit fit_decay_rate(const EnsembleTrace& trace, double asymptote, double expected_rate,
                        const std::vector<double>& exact, int t_min) {
  const int steps = static_cast<int>(trace.mean.size()) - 1;
  const int r_count = static_cast<int>(trace.samples.size());
  if (r_count < 2) throw DomainError("fit_decay_rate: need at least two trajectories");
  if (exact.size() != trace.mean.size()) throw InvalidDimension("fit_decay_rate: exact curve length mismatch");
  int t_max = t_min - 1;
  for (int t = t_min; t <= steps; ++t) {
    if (trace.mean[t] - asymptote < 8.0 * trace.standard_error[t]) break;
    t_max = t;
  }
  if (t_max - t_min < 4) throw DomainError("fit_decay_rate: fewer than five usable points");

  DecayFit fit;
  fit.t_min = t_min;
  fit.t_max = t_max;
  fit.expected = expected_rate;
  fit.rate = -log_slope(trace.mean, asymptote, t_min, t_max);
  fit.window_bias = -log_slope(exact, asymptote, t_min, t_max) - expected_rate;

  std::vector<double> loo(trace.mean.size());
  std::vector<double> rates(r_count);
  for (int r = 0; r < r_count; ++r) {
    for (int t = 0; t <= steps; ++t) loo[t] = (trace.mean[t] * r_count - trace.samples[r][t]) / (r_count - 1);
    rates[r] = -log_slope(loo, asymptote, t_min, t_max);
  }
  double avg = 0.0;
  for (double v : rates) avg += v;
  avg /= r_count;
  double ss = 0.0;
  for (double v : rates) ss += (v - avg) * (v - avg);
  fit.sigma = std::sqrt(ss * (r_count - 1) / r_count);
  return fit;
}

}  // namespace entgap
