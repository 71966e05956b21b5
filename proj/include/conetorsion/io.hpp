#pragma once

#include <iosfwd>
#include <string>

#include "conetorsion/cmc.hpp"
#include "conetorsion/cone.hpp"
#include "conetorsion/fem.hpp"
#include "conetorsion/format.hpp"
#include "conetorsion/shapeflow.hpp"
#include "conetorsion/symmetrize.hpp"

namespace conetorsion {

// {"kind": "planar"|"axisym", "aperture": a, "rho": [...]}
std::string polar_graph_to_json(const PolarGraph& g);
PolarGraph polar_graph_from_json(const std::string& text);

std::string torsion_report_to_json(const TorsionReport& r);

// "vertex_index value" per line
void write_fem_field_text(const FemField& u, std::ostream& os);

// CSV "s,u_sharp"
void write_rearranged_profile_csv(const RearrangedProfile& r, std::ostream& os);

// CSV "step,T,residual,volume,min_rho,max_rho"
void write_flow_history_csv(const FlowState& s, std::ostream& os);

// CSV "s,x,y,k1" (planar) or "s,r,z,k1,k2" (axisymmetric meridian)
void write_curve_csv(const CurveGamma& c, std::ostream& os);

}  // namespace conetorsion
