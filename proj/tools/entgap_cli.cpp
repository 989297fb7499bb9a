#include "entgap/errors.hpp"
#include "entgap/io.hpp"
#include "entgap/markov.hpp"
#include "entgap/schmidt.hpp"
#include "entgap/simulator.hpp"
#include "entgap/spin_solvers.hpp"
#include "entgap/verify.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <omp.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace entgap;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void warn(const std::string& msg) { fmt::print(stderr, "warning: {}\n", msg); }

std::vector<int> parse_n_range(const std::string& text) {
  std::vector<int> out;
  auto to_int = [&](const std::string& s) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size()) throw UsageError("invalid --n value '" + text + "'");
    return v;
  };
  if (const auto colon = text.find(':'); colon != std::string::npos) {
    const int lo = to_int(text.substr(0, colon));
    const int hi = to_int(text.substr(colon + 1));
    if (hi < lo) throw UsageError("empty --n range '" + text + "'");
    for (int n = lo; n <= hi; ++n) out.push_back(n);
    return out;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_int(item));
  if (out.empty()) throw UsageError("empty --n");
  return out;
}

GateKind parse_gate(const std::string& name) {
  try {
    return GateKind::parse(name);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

Topology parse_topology(const std::string& name, int n) {
  try {
    return Topology::parse(name, n);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw UsageError("cannot open output file '" + path + "'");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

void print_json(std::ostream& os, const io::Json& j) { os << j.dump(2) << '\n'; }

// --- gap -----------------------------------------------------------------------

struct GapConfig {
  std::string gate = "u4";
  std::string topology = "open";
  std::string n = "4";
  std::vector<std::string> methods;
  std::optional<double> epsilon;
  std::string format = "csv";
  std::string output;
  std::uint64_t seed = 1;
};

constexpr std::size_t kFullDenseCap = 1024;
constexpr int kReducedSiteCap = 18;

std::optional<double> gap_by_method(const std::string& method, const GateKind& gate, const Topology& topo,
                                    const std::function<const ReducedSpinModel&()>& reduced, std::uint64_t seed) {
  const int n = topo.sites();
  const bool chain = topo.kind() != TopologyKind::AllPairs;
  const Boundary b = topo.kind() == TopologyKind::OpenChain ? Boundary::Open : Boundary::Periodic;
  if (method == "closed_form") {
    if (!chain) throw UnsupportedGate("closed form covers open and periodic chains only");
    return gap_closed_form(reduced(), n, b);
  }
  if (method == "free_fermion") {
    if (topo.kind() != TopologyKind::PeriodicChain) throw UnsupportedGate("free fermions need a periodic chain");
    return gap_free_fermion(reduced(), n);
  }
  if (method == "dense") {
    const auto m = assemble(gate, topo);
    if (m.dim() > kFullDenseCap) throw CapExceeded(fmt::format("dense needs dimension <= {}", kFullDenseCap));
    return dense_spectrum(m.to_dense(), {.compute_residuals = false}).gap();
  }
  if (method == "sparse") {
    if (n > kReducedSiteCap) throw CapExceeded(fmt::format("sparse reduced chain limited to n <= {}", kReducedSiteCap));
    DeflationOptions opts;
    opts.seed = seed;
    return xyz_chain_gap_numeric(reduced(), topo, opts, 0).gap;
  }
  if (method == "lmg_sector") {
    if (chain) throw UnsupportedGate("collective-spin sectors need all-pairs coupling");
    return lmg_gap(reduced(), n).gap;
  }
  if (method == "lmg_classical") {
    if (chain) throw UnsupportedGate("classical limit needs all-pairs coupling");
    return lmg_classical_gap(reduced()).coefficient / n;
  }
  throw UsageError("unknown method '" + method + "'");
}

int cmd_gap(const GapConfig& cfg) {
  const GateKind gate = parse_gate(cfg.gate);
  const auto ns = parse_n_range(cfg.n);
  for (int n : ns) {
    const auto topo = parse_topology(cfg.topology, n);
    if (topo.kind() == TopologyKind::PeriodicChain && n < 3) throw UsageError("periodic chains need n >= 3");
  }
  if (cfg.epsilon && !(*cfg.epsilon > 0.0 && *cfg.epsilon < 1.0)) throw UsageError("--epsilon must lie in (0, 1)");
  static const std::vector<std::string> all_methods = {"closed_form", "free_fermion", "dense",
                                                       "sparse",      "lmg_sector",   "lmg_classical"};
  const auto methods = cfg.methods.empty() ? all_methods : cfg.methods;
  for (const auto& m : methods)
    if (std::find(all_methods.begin(), all_methods.end(), m) == all_methods.end())
      throw UsageError("unknown method '" + m + "'");

  std::optional<ReducedSpinModel> reduced_cache;
  auto reduced = [&]() -> const ReducedSpinModel& {
    if (!reduced_cache) reduced_cache = reduce_gate(gate);
    return *reduced_cache;
  };

  std::vector<io::GapRow> rows;
  for (int n : ns) {
    const auto topo = Topology::parse(cfg.topology, n);
    for (const auto& method : methods) {
      try {
        const auto gap = gap_by_method(method, gate, topo, reduced, cfg.seed);
        if (!gap) continue;
        io::GapRow row{gate.name(), topo.name(), n, *gap, method, std::nullopt};
        if (cfg.epsilon) row.tau = convergence_time(*gap, *cfg.epsilon);
        rows.push_back(row);
      } catch (const UsageError&) {
        throw;
      } catch (const Error& e) {
        warn(fmt::format("{} n={}: {} omitted: {}", cfg.topology, n, method, e.what()));
      }
    }
  }
  Output out(cfg.output);
  if (cfg.format == "json") {
    io::Json arr = io::Json::array();
    for (const auto& r : rows) {
      io::Json j = {{"gate", r.gate}, {"topology", r.topology}, {"n", r.n}, {"gap", r.gap}, {"method", r.method}};
      if (r.tau) j["tau"] = *r.tau;
      arr.push_back(std::move(j));
    }
    print_json(out.stream(), {{"schema_version", io::kSchemaVersion}, {"rows", std::move(arr)}});
  } else {
    io::write_gap_csv(out.stream(), rows, cfg.epsilon.has_value());
  }
  return kExitOk;
}

// --- reduce / model ------------------------------------------------------------

int cmd_reduce(const std::string& gate_name, const std::string& output) {
  const GateKind gate = parse_gate(gate_name);
  const auto model = reduce_gate(gate);
  Output out(output);
  print_json(out.stream(), io::reduced_model_json(model));
  return kExitOk;
}

int cmd_model(const std::string& gate_name, const std::string& format, const std::string& output) {
  const auto model = build_two_site_model(parse_gate(gate_name));
  Output out(output);
  if (format == "json")
    print_json(out.stream(), io::two_site_json(model));
  else
    io::write_two_site_csv(out.stream(), model);
  return kExitOk;
}

// --- evolve / simulate ---------------------------------------------------------

std::vector<int> first_sites(int n, int na) {
  if (na < 1 || na >= n) throw UsageError(fmt::format("--na must lie in [1, {}]", n - 1));
  std::vector<int> a(na);
  for (int s = 0; s < na; ++s) a[s] = s;
  return a;
}

struct RunConfig {
  std::string gate = "u4";
  std::string topology = "open";
  int n = 4;
  int na = 2;
  int steps = 60;
  int trajectories = 1000;
  std::uint64_t seed = 1;
  std::string output;
  bool weights = false;
};

void check_run_sizes(const RunConfig& c, const Topology& topo) {
  if (topo.kind() == TopologyKind::PeriodicChain && c.n < 3) throw UsageError("periodic chains need n >= 3");
  if (c.steps < 0) throw UsageError("--steps must be >= 0");
}

constexpr int kEvolveSiteCap = 8;
constexpr int kExactColumnSiteCap = 6;

int cmd_evolve(const RunConfig& c) {
  const GateKind gate = parse_gate(c.gate);
  const auto topo = parse_topology(c.topology, c.n);
  check_run_sizes(c, topo);
  if (c.n > kEvolveSiteCap) throw UsageError(fmt::format("evolve limited to n <= {}", kEvolveSiteCap));
  const auto a = first_sites(c.n, c.na);
  const auto m = assemble(gate, topo);
  Output out(c.output);
  if (c.weights) {
    if (c.n > 6) throw UsageError("--weights export limited to n <= 6");
    auto states = evolve(m, initial_weights_z(c.n), c.steps);
    io::write_weight_vector_csv(out.stream(), states.back(), c.n);
  } else {
    auto trace = evolve_purity(m, initial_weights_z(c.n), c.steps, a);
    io::write_purity_trace_csv(out.stream(), trace);
  }
  return kExitOk;
}

int cmd_simulate(const RunConfig& c) {
  const GateKind gate = parse_gate(c.gate);
  if (gate.tag == GateTag::GenericP) throw UsageError("simulate supports u4, cnot and xy");
  const auto topo = parse_topology(c.topology, c.n);
  check_run_sizes(c, topo);
  if (c.trajectories < 1) throw UsageError("--traj must be >= 1");
  const auto a = first_sites(c.n, c.na);
  const auto spec = ProtocolSpec::make(gate, topo, a, c.steps, c.trajectories, c.seed);
  try {
    validate(spec);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  const auto trace = ensemble_purity(spec, StateVector::all_zero(c.n));
  std::optional<std::vector<double>> exact;
  if (c.n <= kExactColumnSiteCap)
    exact = evolve_purity(assemble(gate, topo), initial_weights_z(c.n), c.steps, a).values;
  if (trace.diagnostics.renormalizations > 0)
    warn(fmt::format("{} renormalizations, max norm drift {:.2e}", trace.diagnostics.renormalizations,
                     trace.diagnostics.max_norm_drift));
  Output out(c.output);
  io::write_ensemble_csv(out.stream(), trace, exact ? &*exact : nullptr);
  return kExitOk;
}

// --- verify --------------------------------------------------------------------

struct VerifyConfig {
  std::vector<std::string> only;
  std::optional<int> n;
  std::optional<std::string> gate;
  std::uint64_t seed = 20240601;
  int trajectories = 2000;
  std::string output;
};

int cmd_verify(const VerifyConfig& c) {
  VerifyOptions opts;
  opts.n = c.n;
  if (c.gate) opts.gate = parse_gate(*c.gate);
  opts.seed = c.seed;
  opts.trajectories = c.trajectories;
  if (opts.trajectories < 2) throw UsageError("--traj must be >= 2");
  std::vector<std::string> names;
  for (const auto& item : c.only) {
    std::stringstream ss(item);
    std::string name;
    while (std::getline(ss, name, ',')) {
      const auto& known = check_names();
      if (std::find(known.begin(), known.end(), name) == known.end())
        throw UsageError("unknown check '" + name + "'");
      names.push_back(name);
    }
  }
  const auto results = run_checks(names, opts);
  bool all = true;
  for (const auto& r : results) {
    all = all && r.passed;
    fmt::print(stderr, "{} {} ({:.2f} s){}{}\n", r.passed ? "PASS" : "FAIL", r.name, r.seconds,
               r.detail.empty() ? "" : ": ", r.detail);
  }
  Output out(c.output);
  print_json(out.stream(), verification_report(results));
  return all ? kExitOk : kExitFailure;
}

void set_threads(std::optional<int> flag) {
  std::optional<int> threads = flag;
  if (!threads) {
    if (const char* env = std::getenv("ENTGAP_THREADS")) {
      try {
        threads = std::stoi(env);
      } catch (const std::exception&) {
        throw UsageError(std::string("invalid ENTGAP_THREADS '") + env + "'");
      }
    }
  }
  if (threads) {
    if (*threads < 1) throw UsageError("thread count must be >= 1");
    omp_set_num_threads(*threads);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral gaps of random entangling protocols"};
  app.require_subcommand(1);
  app.fallthrough();
  std::optional<int> threads;
  app.add_option("--threads", threads, "Worker thread cap (default: ENTGAP_THREADS or all cores)");

  const std::vector<std::string> gate_names = {"u4", "cnot", "xy", "p4", "p9", "p16", "p81"};
  const std::vector<std::string> topo_names = {"open", "periodic", "all"};

  GapConfig gap;
  auto* gap_cmd = app.add_subcommand("gap", "Spectral gap table by every applicable method");
  gap_cmd->add_option("--gate", gap.gate)->check(CLI::IsMember(gate_names));
  gap_cmd->add_option("--topology", gap.topology)->check(CLI::IsMember(topo_names));
  gap_cmd->add_option("--n", gap.n, "N, A:B or comma list");
  gap_cmd->add_option("--method", gap.methods, "Restrict to these methods")->delimiter(',');
  gap_cmd->add_option("--epsilon", gap.epsilon, "Adds tau = ln(1/epsilon)/gap");
  gap_cmd->add_option("--format", gap.format)->check(CLI::IsMember({"csv", "json"}));
  gap_cmd->add_option("--seed", gap.seed);
  gap_cmd->add_option("-o,--output", gap.output);

  std::string reduce_gate_name = "u4", reduce_output;
  auto* reduce_cmd = app.add_subcommand("reduce", "Reduced spin model of a gate as JSON");
  reduce_cmd->add_option("--gate", reduce_gate_name)->check(CLI::IsMember(gate_names));
  reduce_cmd->add_option("-o,--output", reduce_output);

  std::string model_gate = "u4", model_format = "csv", model_output;
  auto* model_cmd = app.add_subcommand("model", "Two-site Markov matrix");
  model_cmd->add_option("--gate", model_gate)->check(CLI::IsMember(gate_names));
  model_cmd->add_option("--format", model_format)->check(CLI::IsMember({"csv", "json"}));
  model_cmd->add_option("-o,--output", model_output);

  RunConfig evolve_cfg;
  auto* evolve_cmd = app.add_subcommand("evolve", "Exact purity trace from the Markov evolution");
  evolve_cmd->add_option("--gate", evolve_cfg.gate)->check(CLI::IsMember(gate_names));
  evolve_cmd->add_option("--topology", evolve_cfg.topology)->check(CLI::IsMember(topo_names));
  evolve_cmd->add_option("--n", evolve_cfg.n);
  evolve_cmd->add_option("--na", evolve_cfg.na, "Subsystem A = sites 0..na-1");
  evolve_cmd->add_option("--steps", evolve_cfg.steps);
  evolve_cmd->add_flag("--weights", evolve_cfg.weights, "Write the final weight vector instead");
  evolve_cmd->add_option("-o,--output", evolve_cfg.output);

  RunConfig sim_cfg;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo purity trace from statevector trajectories");
  sim_cmd->add_option("--gate", sim_cfg.gate)->check(CLI::IsMember({"u4", "cnot", "xy"}));
  sim_cmd->add_option("--topology", sim_cfg.topology)->check(CLI::IsMember(topo_names));
  sim_cmd->add_option("--n", sim_cfg.n);
  sim_cmd->add_option("--na", sim_cfg.na, "Subsystem A = sites 0..na-1");
  sim_cmd->add_option("--steps", sim_cfg.steps);
  sim_cmd->add_option("--traj", sim_cfg.trajectories);
  sim_cmd->add_option("--seed", sim_cfg.seed);
  sim_cmd->add_option("-o,--output", sim_cfg.output);

  VerifyConfig ver;
  auto* ver_cmd = app.add_subcommand("verify", "Run the verification checks; JSON report on stdout");
  ver_cmd->add_option("--only", ver.only, "Comma-separated check names");
  ver_cmd->add_option("--n", ver.n);
  ver_cmd->add_option("--gate", ver.gate)->check(CLI::IsMember(gate_names));
  ver_cmd->add_option("--seed", ver.seed);
  ver_cmd->add_option("--traj", ver.trajectories);
  ver_cmd->add_option("-o,--output", ver.output);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    set_threads(threads);
    if (*gap_cmd) return cmd_gap(gap);
    if (*reduce_cmd) return cmd_reduce(reduce_gate_name, reduce_output);
    if (*model_cmd) return cmd_model(model_gate, model_format, model_output);
    if (*evolve_cmd) return cmd_evolve(evolve_cfg);
    if (*sim_cmd) return cmd_simulate(sim_cfg);
    if (*ver_cmd) return cmd_verify(ver);
  } catch (const UsageError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitUsage;
  } catch (const DomainError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitUsage;
  } catch (const CapExceeded& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitFailure;
  }
  return kExitUsage;
}
