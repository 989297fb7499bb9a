#include "entgap/verify.hpp"

#include "entgap/eigensolver.hpp"
#include "entgap/errors.hpp"
#include "entgap/markov.hpp"
#include "entgap/schmidt.hpp"
#include "entgap/simulator.hpp"
#include "entgap/spin_solvers.hpp"

#include <boost/rational.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>

namespace entgap {

namespace {

struct Tally {
  CheckResult& r;
  bool ok = true;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (!r.detail.empty()) r.detail += "; ";
      r.detail += what;
    }
  }
  void within(double deviation, const std::string& what) {
    r.measured = std::max(r.measured, deviation);
    expect(deviation <= r.tolerance, fmt::format("{}: deviation {:.3e} > {:.1e}", what, deviation, r.tolerance));
  }
};

std::vector<GateKind> qubit_gates(const VerifyOptions& o) {
  if (o.gate) return {*o.gate};
  return {GateKind::haar_u4(), GateKind::cnot(), GateKind::xy()};
}

std::vector<int> sizes(const VerifyOptions& o, int lo, int hi) {
  if (o.n) return {*o.n};
  std::vector<int> v;
  for (int n = lo; n <= hi; ++n) v.push_back(n);
  return v;
}

std::string label(const GateKind& g, const std::string& topo, int n) { return fmt::format("{} {} n={}", g.name(), topo, n); }

void check_permutation_tables(const VerifyOptions&, CheckResult& r) {
  r.tolerance = 0.0;
  Tally t{r};
  const Permutation16 f = {0, 1, 14, 15, 5, 4, 11, 10, 9, 8, 7, 6, 12, 13, 2, 3};
  const Permutation16 g = {0, 11, 7, 12, 14, 5, 9, 2, 13, 6, 10, 1, 3, 8, 4, 15};
  const auto df = derive_conjugation_permutation(gate_matrix(GateKind::cnot()));
  const auto dg = derive_conjugation_permutation(gate_matrix(GateKind::xy()));
  int mismatches = 0;
  for (int a = 0; a < 16; ++a) mismatches += (df[a] != f[a]) + (dg[a] != g[a]);
  r.measured = mismatches;
  t.expect(mismatches == 0, fmt::format("{} table entries differ", mismatches));
  r.passed = t.ok;
}

void check_reduction_identities(const VerifyOptions& o, CheckResult& r) {
  r.tolerance = 1e-10;
  Tally t{r};
  struct Expected {
    GateKind gate;
    int rank;
    double gamma, h, d, jz_over_scale, scale;
  };
  const std::vector<Expected> cases = {
      {GateKind::haar_u4(), 4, 3.0 / 5, 4.0 / 5, 0.5, 0.0, 0.5},
      {GateKind::cnot(), 3, 1.0, 4.0 / 3, 5.0 / 9, -1.0 / 3, 1.0 / 3},
      {GateKind::xy(), 6, 0.5, 2.0 / 3, 7.0 / 18, 1.0 / 12, 2.0 / 3},
  };
  for (const auto& c : cases) {
    if (o.gate && !(*o.gate == c.gate)) continue;
    const auto m = reduce_two_site(build_two_site_model(c.gate));
    const double s = c.scale;
    const Eigen::Matrix4d expected =
        xyz_block(c.d, s * (1 + c.gamma) / 2, s * (1 - c.gamma) / 2, s * c.jz_over_scale, s * c.h);
    t.within((m.block - expected).cwiseAbs().maxCoeff(), c.gate.name() + " reduced block");
    t.within(std::abs(m.gamma - c.gamma), c.gate.name() + " gamma");
    t.within(std::abs(m.h - c.h), c.gate.name() + " h");
    t.within(std::abs(m.d - c.d), c.gate.name() + " offset");
    t.within(std::abs(m.jz - s * c.jz_over_scale), c.gate.name() + " Jz");
    t.expect(m.schmidt_rank == c.rank, fmt::format("{} Schmidt rank {} != {}", c.gate.name(), m.schmidt_rank, c.rank));
  }
  const std::vector<std::tuple<int, double, double>> generic = {
      {2, 1.0 / 3, 2 * std::sqrt(2.0) / 3}, {3, 0.5, std::sqrt(3.0) / 2}, {4, 0.6, 0.8}, {9, 0.8, 0.6}};
  for (const auto& [k, gamma, h] : generic) {
    const auto m = reduce_generic_P(k);
    const double circle = std::abs(m.gamma * m.gamma + m.h * m.h - 1.0);
    r.measured = std::max(r.measured, circle);
    t.expect(circle <= 1e-12, fmt::format("P{} gamma^2+h^2-1 = {:.3e}", k * k, circle));
    t.within(std::abs(m.gamma - gamma), fmt::format("P{} gamma", k * k));
    t.within(std::abs(m.h - h), fmt::format("P{} h", k * k));
  }
  r.passed = t.ok;
}

void check_closed_form_gaps(const VerifyOptions& o, CheckResult& r) {
  r.tolerance = 1e-8;
  Tally t{r};
  const auto red = reduce_gate(GateKind::haar_u4());
  for (int n : sizes(o, 3, 5)) {
    for (Boundary b : {Boundary::Open, Boundary::Periodic}) {
      const auto topo = b == Boundary::Open ? Topology::open_chain(n) : Topology::periodic_chain(n);
      const auto m = assemble(GateKind::haar_u4(), topo);
      const auto spec = dense_spectrum(m.to_dense(), {.compute_residuals = false});
      const double lambda = 1.0 - gap_closed_form(red, n, b);
      const std::string what = label(GateKind::haar_u4(), topo.name(), n);
      t.within(std::abs(1.0 - lambda - gap_closed_form(0.8, n, b)), what + " energy route vs formula");
      t.within(std::abs(spec.eigenvalues[2].real() - lambda) + std::abs(spec.eigenvalues[2].imag()), what + " third eigenvalue");
      const auto count = std::count_if(spec.eigenvalues.begin(), spec.eigenvalues.end(),
                                       [&](const Complex& z) { return std::abs(z - lambda) <= 1e-8; });
      const long want = b == Boundary::Open ? 2 : 1;
      t.expect(count == want, fmt::format("{}: 1-gap multiplicity {} != {}", what, count, want));
    }
  }
  r.passed = t.ok;
}

void check_spectrum_union(const VerifyOptions& o, CheckResult& r) {
  r.tolerance = 1e-8;
  Tally t{r};
  for (const auto& g : qubit_gates(o)) {
    const auto red = reduce_gate(g);
    for (int n : sizes(o, 3, 4)) {
      for (const std::string topo_name : {"open", "periodic"}) {
        const auto topo = Topology::parse(topo_name, n);
        const auto full = dense_spectrum(assemble(g, topo).to_dense(), {.compute_residuals = false});
        const auto uni = subchain_spectrum_union(red, topo);
        const auto cmp = compare_spectra(full.eigenvalues, uni, r.tolerance);
        r.measured = std::max(r.measured, cmp.max_deviation);
        t.expect(cmp.equal, label(g, topo_name, n) + ": " + cmp.detail);
      }
    }
  }
  r.passed = t.ok;
}

void check_free_fermions(const VerifyOptions& o, CheckResult& r) {
  r.tolerance = 1e-10;
  Tally t{r};
  const std::vector<std::pair<double, double>> params = {{0.6, 0.8}, {1.0, 4.0 / 3}, {0.5, 2.0 / 3}};
  for (int n : sizes(o, 2, 12)) {
    std::vector<double> periodic_dense;
    for (const auto& [gamma, h] : params) {
      const XYChainSpec spec{n, gamma, h, Boundary::Periodic};
      const auto ff = free_fermion_energies(spec);
      const auto dense = xy_dense_energies(spec);
      if (periodic_dense.empty()) periodic_dense = dense;
      double dev = 0.0;
      for (std::size_t i = 0; i < ff.size(); ++i) dev = std::max(dev, std::abs(ff[i] - dense[i]));
      t.within(dev, fmt::format("free fermions n={} gamma={:.4g} h={:.4g}", n, gamma, h));
    }
    for (Boundary b : {Boundary::Periodic, Boundary::Open}) {
      const XYChainSpec spec{n, 0.6, 0.8, b};
      const auto top = xy_top_eigenenergies(spec);
      const auto dense = b == Boundary::Periodic ? periodic_dense : xy_dense_energies(spec);
      const std::string what = fmt::format("{} n={}", b == Boundary::Open ? "open" : "periodic", n);
      t.within(std::max({std::abs(top.e1 - dense[0]), std::abs(top.e2 - dense[1]), std::abs(top.e3 - dense[2])}),
               what + " E1,E2,E3");
      const auto count = std::count_if(dense.begin(), dense.end(), [&](double e) { return std::abs(e - top.e3) <= 1e-8; });
      t.expect(count == top.e3_degeneracy, fmt::format("{}: E3 multiplicity {} != {}", what, count, top.e3_degeneracy));
    }
  }
  r.passed = t.ok;
}

void check_lmg_asymptote(const VerifyOptions& o, CheckResult& r) {
  r.tolerance = 1e-3;
  Tally t{r};
  const std::map<GateTag, double> target = {{GateTag::HaarU4, 6.0 / 5}, {GateTag::CNOT, 4.0 / 3}, {GateTag::XYgate, 4.0 / 3}};
  const std::vector<int> ns = o.n ? std::vector<int>{*o.n / 2, *o.n, *o.n * 2} : std::vector<int>{200, 400, 800};
  for (const auto& g : qubit_gates(o)) {
    const auto it = target.find(g.tag);
    if (it == target.end()) throw UnsupportedGate("lmg-asymptote: no reference constant for " + g.name());
    const auto red = reduce_gate(g);
    const auto fit = lmg_asymptote(red, ns);
    t.within(std::abs(fit.a - it->second), fmt::format("{} fitted a = {:.7f}", g.name(), fit.a));
    const auto cl = lmg_classical_gap(red);
    const double dev = std::abs(cl.coefficient - it->second);
    r.measured = std::max(r.measured, dev);
    t.expect(dev <= 1e-9, fmt::format("{} classical a = {:.12f}", g.name(), cl.coefficient));
    for (int n : ns) {
      const auto lg = lmg_gap(red, n);
      t.expect(lg.fourth_multiplicity == static_cast<std::uint64_t>(n - 1) && lg.fourth_two_s == n - 2,
               fmt::format("{} n={}: fourth eigenvalue multiplicity {}", g.name(), n, lg.fourth_multiplicity));
    }
    if (t.ok) {
      if (!r.detail.empty()) r.detail += "; ";
      r.detail += fmt::format("{}: a = {:.7f} (fit), {:.12f} (classical)", g.name(), fit.a, cl.coefficient);
    }
  }
  r.passed = t.ok;
}

void check_reduced_chain_scaling(const VerifyOptions& o, CheckResult& r) {
  r.tolerance = 1e-7;
  Tally t{r};
  const auto red = reduce_gate(GateKind::haar_u4());
  for (int n : sizes(o, 8, 14)) {
    const auto topo = Topology::open_chain(n);
    const auto num = xyz_chain_gap_numeric(red, topo, {}, 1024);
    t.within(std::abs(num.gap - gap_closed_form(red, n, Boundary::Open)), fmt::format("open n={} ({})", n, num.method));
    t.expect(num.top_doubly_degenerate, fmt::format("open n={}: eigenvalue 1 not doubly degenerate", n));
  }
  r.passed = t.ok;
}

void check_monte_carlo(const VerifyOptions& o, CheckResult& r) {
  r.tolerance = 5.0;  // standard errors
  Tally t{r};
  constexpr int kSteps = 60;
  const int n = 4;
  const std::vector<int> a = {0, 1};
  const double asymptote = haar_purity(n, 2);
  std::vector<std::pair<GateKind, Topology>> cases = {{GateKind::haar_u4(), Topology::open_chain(n)},
                                                      {GateKind::cnot(), Topology::periodic_chain(n)}};
  for (const auto& [g, topo] : cases) {
    if (o.gate && !(*o.gate == g)) continue;
    const std::string what = label(g, topo.name(), n);
    const auto m = assemble(g, topo);
    const auto exact = evolve_purity(m, initial_weights_z(n), kSteps, a).values;
    const auto spec = ProtocolSpec::make(g, topo, a, kSteps, o.trajectories, o.seed);
    const auto mc = ensemble_purity(spec, StateVector::all_zero(n));
    double worst = 0.0;
    int worst_t = 0;
    for (int s = 0; s <= kSteps; ++s) {
      const double dev = std::abs(mc.mean[s] - exact[s]);
      const double z = dev <= 1e-12 ? 0.0 : dev / mc.standard_error[s];
      if (z > worst) {
        worst = z;
        worst_t = s;
      }
    }
    r.measured = std::max(r.measured, worst);
    t.expect(worst <= 5.0, fmt::format("{}: step {} off by {:.2f} standard errors", what, worst_t, worst));

    const auto lead = dense_spectrum(m.to_dense(), {.compute_residuals = false});
    const double expected = -std::log(std::abs(lead.eigenvalues[2]));
    const auto fit = fit_decay_rate(mc, asymptote, expected, exact);
    const double zr = std::abs(fit.rate - fit.expected) / fit.combined_sigma();
    t.expect(fit.agrees(3.0), fmt::format("{}: decay rate {:.5f} vs {:.5f} ({:.2f} combined sigma)", what, fit.rate,
                                          fit.expected, zr));

    const double za = std::abs(mc.mean[kSteps] - asymptote) / mc.standard_error[kSteps];
    t.expect(za <= 5.0, fmt::format("{}: asymptotic purity {:.5f} is {:.2f} sigma from {:.5f}", what, mc.mean[kSteps],
                                    za, asymptote));
    if (t.ok) {
      if (!r.detail.empty()) r.detail += "; ";
      r.detail += fmt::format("{}: max {:.2f} sigma, rate {:.5f}+-{:.5f} vs {:.5f} (t {}..{})", what, worst, fit.rate,
                              fit.combined_sigma(), fit.expected, fit.t_min, fit.t_max);
    }
  }
  r.passed = t.ok;
}

void check_fixed_point(const VerifyOptions& o, CheckResult& r) {
  r.tolerance = 1e-12;
  Tally t{r};
  for (const auto& g : qubit_gates(o)) {
    for (int n : sizes(o, 2, 6)) {
      for (const std::string topo_name : {"open", "periodic", "all"}) {
        const auto m = assemble(g, Topology::parse(topo_name, n));
        const auto star = fixed_point(n);
        const auto image = m(star);
        double dev = 0.0;
        for (std::size_t i = 0; i < star.size(); ++i) dev = std::max(dev, std::abs(image[i] - star[i]));
        t.within(dev, label(g, topo_name, n) + " fixed point");
      }
    }
  }
  using Q = boost::rational<std::int64_t>;
  int exact_failures = 0;
  for (int n : sizes(o, 2, 10)) {
    const auto star = fixed_point_of<Q>(n);
    for (int na = 1; na < n; ++na) {
      std::vector<int> a(na);
      for (int s = 0; s < na; ++s) a[s] = s;
      const Q got = purity_of<Q>(std::span<const Q>(star), n, a);
      const Q want = Q((std::int64_t{1} << na) + (std::int64_t{1} << (n - na)), (std::int64_t{1} << n) + 1);
      if (got != want) {
        ++exact_failures;
        t.expect(false, fmt::format("n={} n_A={}: purity {}/{} != {}/{}", n, na, got.numerator(), got.denominator(),
                                    want.numerator(), want.denominator()));
      }
    }
  }
  r.passed = t.ok && exact_failures == 0;
}

struct CheckEntry {
  std::string name;
  double budget;
  std::function<void(const VerifyOptions&, CheckResult&)> run;
};

const std::vector<CheckEntry>& registry() {
  static const std::vector<CheckEntry> entries = {
      {"permutation-tables", 1.0, check_permutation_tables},
      {"reduction-identities", 1.0, check_reduction_identities},
      {"closed-form-gaps", 120.0, check_closed_form_gaps},
      {"spectrum-union", 300.0, check_spectrum_union},
      {"free-fermions", 60.0, check_free_fermions},
      {"lmg-asymptote", 60.0, check_lmg_asymptote},
      {"reduced-chain-scaling", 120.0, check_reduced_chain_scaling},
      {"monte-carlo", 120.0, check_monte_carlo},
      {"fixed-point", 120.0, check_fixed_point},
  };
  return entries;
}

}  // namespace

const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& e : registry()) v.push_back(e.name);
    return v;
  }();
  return names;
}

CheckResult run_check(const std::string& name, const VerifyOptions& options) {
  const auto& reg = registry();
  const auto it = std::find_if(reg.begin(), reg.end(), [&](const CheckEntry& e) { return e.name == name; });
  if (it == reg.end()) throw DomainError("unknown check '" + name + "'");
  CheckResult r;
  r.name = name;
  r.budget_seconds = it->budget;
  const auto start = std::chrono::steady_clock::now();
  try {
    it->run(options, r);
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("error: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (r.seconds > r.budget_seconds) {
    r.passed = false;
    r.detail += fmt::format("{}runtime {:.1f} s exceeds {:.0f} s", r.detail.empty() ? "" : "; ", r.seconds, r.budget_seconds);
  }
  return r;
}

std::vector<CheckResult> run_checks(const std::vector<std::string>& names, const VerifyOptions& options) {
  std::vector<CheckResult> out;
  for (const auto& n : names.empty() ? check_names() : names) out.push_back(run_check(n, options));
  return out;
}

io::Json verification_report(const std::vector<CheckResult>& results) {
  io::Json checks = io::Json::array();
  bool all = true;
  for (const auto& r : results) {
    all = all && r.passed;
    checks.push_back({{"name", r.name},
                      {"status", r.passed ? "pass" : "fail"},
                      {"measured", r.measured},
                      {"tolerance", r.tolerance},
                      {"seconds", r.seconds},
                      {"detail", r.detail}});
  }
  return {{"schema_version", io::kSchemaVersion}, {"passed", all}, {"checks", std::move(checks)}};
}

}  // namespace entgap
