#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include "epinet/analysis.hpp"
#include "epinet/gillespie.hpp"
#include "epinet/moments.hpp"
#include "epinet/residuals.hpp"

namespace epinet {

// Edge-list text format: first line "N M", then M lines "i j" (0-based).
// Blank lines and '#' comments are ignored. Writing is canonical: edges
// sorted lexicographically, LF endings.
Graph read_edge_list(std::istream& in);
Graph read_edge_list_file(const std::string& path);
void write_edge_list(std::ostream& out, const Graph& g);
void write_edge_list_file(const std::string& path, const Graph& g);

// 17-significant-digit decimal rendering; round-trips binary64 exactly.
std::string format_double(double value);

// CSV header: t_star,y_I,y_R,var_z,e_cut,e_mixed,e_z_cut,s_I followed by
// optional per-node marginal columns pI_* (and pR_* for SIR).
void write_moments_csv(std::ostream& out, const ReducedTrajectory& rt, bool marginals);

// CSV header: t_star,mean_zI,se_zI,var_zI,mean_zR,se_zR,mean_cut,se_cut,
//             mean_mixed,se_mixed,mean_zcut,se_zcut
void write_ensemble_csv(std::ostream& out, const EnsembleStats& stats);

// CSV header: t_star,node,event  (event in {infect, cure, remove})
void write_trace_csv(std::ostream& out, const EventTrace& trace);

// CSV header: state_index,probability
void write_distribution_csv(std::ostream& out, std::span<const double> dist);

// CSV header: tau,y_qs,h_tau,chi,eps_link_max
void write_threshold_curve_csv(std::ostream& out, std::span<const ThresholdCurvePoint> curve);

// JSON rendering with a fixed field order, reproducible byte for byte.
std::string threshold_report_json(const ThresholdReport& report);

}  // namespace epinet
