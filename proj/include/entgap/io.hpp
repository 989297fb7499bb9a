#pragma once

// CSV and JSON exports. CSV reals use 17 significant digits; JSON numbers use
// the shortest representation that round-trips to the same double.

#include "entgap/eigensolver.hpp"
#include "entgap/markov.hpp"
#include "entgap/pauli.hpp"
#include "entgap/schmidt.hpp"
#include "entgap/simulator.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace entgap::io {

inline constexpr int kSchemaVersion = 1;

using Json = nlohmann::ordered_json;

std::string real(double v);

void write_two_site_csv(std::ostream& os, const TwoSiteModel& model);
Json two_site_json(const TwoSiteModel& model);

/// Header `t,purity,distance_to_fixed_point`.
void write_purity_trace_csv(std::ostream& os, const PurityTrace& trace);

/// Header `alpha_base4,weight`; the label is written site n-1 first. n <= 6.
void write_weight_vector_csv(std::ostream& os, const WeightVector& x, int n);

Json reduced_model_json(const ReducedSpinModel& model);

struct GapRow {
  std::string gate;
  std::string topology;
  int n = 0;
  double gap = 0.0;
  std::string method;
  std::optional<double> tau;
};

/// Header `gate,topology,n,gap,method`, plus `,tau` when with_tau.
void write_gap_csv(std::ostream& os, const std::vector<GapRow>& rows, bool with_tau);

Json spectral_json(const SpectralResult& result);

/// Header `t,mean_purity,stderr,n,gate,topology,n_A,R,seed`, plus
/// `,exact_purity` when an exact curve is supplied.
void write_ensemble_csv(std::ostream& os, const EnsembleTrace& trace, const std::vector<double>* exact = nullptr);

}  // namespace entgap::io
