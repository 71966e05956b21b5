#include "conetorsion/io.hpp"

#include <ostream>

#include <json.hpp>

#include "conetorsion/errors.hpp"
#include "conetorsion/format.hpp"

namespace conetorsion {

using nlohmann::json;

std::string polar_graph_to_json(const PolarGraph& g) {
  json j;
  j["kind"] = g.cone.planar2d() ? "planar" : "axisym";
  j["aperture"] = g.cone.aperture;
  j["rho"] = g.rho;
  return j.dump(2) + "\n";
}

PolarGraph polar_graph_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid polar graph JSON: ") + e.what());
  }
  for (const char* field : {"kind", "aperture", "rho"})
    if (!j.contains(field)) throw ConfigError(std::string("missing field: ") + field);
  PolarGraph g;
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "planar")
    g.cone.kind = ConeKind::Planar2D;
  else if (kind == "axisym")
    g.cone.kind = ConeKind::Axisym3D;
  else
    throw ConfigError("field kind must be \"planar\" or \"axisym\"");
  g.cone.aperture = j["aperture"].get<double>();
  g.rho = j["rho"].get<std::vector<double>>();
  try {
    g.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return g;
}

std::string torsion_report_to_json(const TorsionReport& r) {
  json j;
  j["energy_T"] = r.energy_T;
  j["dirichlet_energy"] = r.dirichlet_energy;
  j["mass"] = r.mass;
  j["rayleigh_T"] = r.rayleigh_T;
  j["functional_J"] = r.functional_J_value;
  j["flux_mean"] = r.flux_mean;
  j["flux_deviation"] = r.flux_deviation;
  j["cg_iterations"] = r.cg_iterations;
  j["cg_residual"] = r.cg_residual;
  json flux = json::array();
  for (const auto& s : r.flux_on_gamma) {
    flux.push_back({{"theta", s.theta}, {"value", s.value}, {"measure", s.measure}});
  }
  j["flux_on_gamma"] = flux;
  return j.dump(2) + "\n";
}

void write_fem_field_text(const FemField& u, std::ostream& os) {
  for (std::size_t i = 0; i < u.values.size(); ++i)
    os << i << ' ' << format_double(u.values[i]) << '\n';
}

void write_rearranged_profile_csv(const RearrangedProfile& r, std::ostream& os) {
  os << "s,u_sharp\n";
  for (std::size_t i = 0; i < r.breakpoints.size(); ++i)
    os << format_double(r.breakpoints[i]) << ',' << format_double(r.values[i]) << '\n';
}

void write_flow_history_csv(const FlowState& s, std::ostream& os) {
  os << "step,T,residual,volume,min_rho,max_rho\n";
  for (const auto& rec : s.history)
    os << rec.step << ',' << format_double(rec.objective) << ',' << format_double(rec.residual)
       << ',' << format_double(rec.volume) << ',' << format_double(rec.min_rho) << ','
       << format_double(rec.max_rho) << '\n';
}

void write_curve_csv(const CurveGamma& c, std::ostream& os) {
  const bool planar = c.cone.planar2d();
  os << (planar ? "s,x,y,k1\n" : "s,r,z,k1,k2\n");
  double arclen = 0.0;
  for (int i = 0; i < c.n_samples(); ++i) {
    if (i > 0) {
      const double dx = c.points[i][0] - c.points[i - 1][0];
      const double dy = c.points[i][1] - c.points[i - 1][1];
      arclen += std::sqrt(dx * dx + dy * dy);
    }
    os << format_double(arclen) << ',' << format_double(c.points[i][0]) << ','
       << format_double(c.points[i][1]) << ',' << format_double(c.k1[i]);
    if (!planar) os << ',' << format_double(c.k2[i]);
    os << '\n';
  }
}

}  // namespace conetorsion
