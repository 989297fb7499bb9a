#include "entgap/io.hpp"

#include "entgap/errors.hpp"
#include "entgap/numeric.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace entgap::io {

std::string real(double v) { return fmt::format("{:.17g}", v); }

void write_two_site_csv(std::ostream& os, const TwoSiteModel& model) {
  for (Eigen::Index r = 0; r < model.matrix.rows(); ++r) {
    for (Eigen::Index c = 0; c < model.matrix.cols(); ++c) {
      if (c) os << ',';
      os << real(model.matrix(r, c));
    }
    os << '\n';
  }
}

Json two_site_json(const TwoSiteModel& model) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < model.matrix.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < model.matrix.cols(); ++c) row.push_back(model.matrix(r, c));
    rows.push_back(std::move(row));
  }
  return {{"schema_version", kSchemaVersion}, {"gate", model.gate.name()}, {"m", model.m}, {"matrix", std::move(rows)}};
}

void write_purity_trace_csv(std::ostream& os, const PurityTrace& trace) {
  os << "t,purity,distance_to_fixed_point\n";
  for (std::size_t i = 0; i < trace.times.size(); ++i) {
    const double dist = i < trace.distance_to_fixed_point.size() ? trace.distance_to_fixed_point[i] : 0.0;
    fmt::print(os, "{},{},{}\n", trace.times[i], real(trace.values[i]), real(dist));
  }
}

void write_weight_vector_csv(std::ostream& os, const WeightVector& x, int n) {
  if (n > 6) throw CapExceeded("weight vector export limited to n <= 6");
  if (x.size() != ipow(4, n)) throw InvalidDimension("weight vector length is not 4^n");
  os << "alpha_base4,weight\n";
  for (std::size_t alpha = 0; alpha < x.size(); ++alpha) {
    std::string label(static_cast<std::size_t>(n), '0');
    for (int s = 0; s < n; ++s) label[n - 1 - s] = static_cast<char>('0' + ((alpha >> (2 * s)) & 3U));
    os << label << ',' << real(x[alpha]) << '\n';
  }
}

Json reduced_model_json(const ReducedSpinModel& m) {
  return {{"schema_version", kSchemaVersion},
          {"gate", m.gate},
          {"d", m.d},
          {"Jx", m.jx},
          {"Jy", m.jy},
          {"Jz", m.jz},
          {"h", m.h},
          {"h_field", m.h_field},
          {"scale", m.scale},
          {"gamma", m.gamma},
          {"h_xy_form", m.h_xy_form},
          {"rank", m.schmidt_rank},
          {"kernel_dim", m.kernel_dim}};
}

void write_gap_csv(std::ostream& os, const std::vector<GapRow>& rows, bool with_tau) {
  os << "gate,topology,n,gap,method" << (with_tau ? ",tau" : "") << '\n';
  for (const auto& r : rows) {
    fmt::print(os, "{},{},{},{},{}", r.gate, r.topology, r.n, real(r.gap), r.method);
    if (with_tau) os << ',' << (r.tau ? real(*r.tau) : std::string());
    os << '\n';
  }
}

Json spectral_json(const SpectralResult& result) {
  Json values = Json::array();
  for (std::size_t i = 0; i < result.eigenvalues.size(); ++i) {
    Json v = {{"re", result.eigenvalues[i].real()}, {"im", result.eigenvalues[i].imag()}};
    if (i < result.residuals.size()) v["residual"] = result.residuals[i];
    values.push_back(std::move(v));
  }
  return {{"schema_version", kSchemaVersion},
          {"method", result.method},
          {"eigenvalues", std::move(values)},
          {"clusters", result.clusters},
          {"iterations", result.iterations},
          {"certified", result.certified}};
}

void write_ensemble_csv(std::ostream& os, const EnsembleTrace& trace, const std::vector<double>* exact) {
  if (exact && exact->size() != trace.mean.size()) throw InvalidDimension("exact purity column length mismatch");
  os << "t,mean_purity,stderr,n,gate,topology,n_A,R,seed" << (exact ? ",exact_purity" : "") << '\n';
  for (std::size_t i = 0; i < trace.times.size(); ++i) {
    fmt::print(os, "{},{},{},{},{},{},{},{},{}", trace.times[i], real(trace.mean[i]), real(trace.standard_error[i]),
               trace.n, trace.gate, trace.topology, trace.n_a, trace.trajectories, trace.seed);
    if (exact) os << ',' << real((*exact)[i]);
    os << '\n';
  }
}

}  // namespace entgap::io
