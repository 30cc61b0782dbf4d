#pragma once

#include <iosfwd>
#include <string>

#include "rough/fbm.hpp"
#include "rough/grid.hpp"
#include "rough/lift.hpp"
#include "rough/sde.hpp"

namespace rough {

/// Path CSV: header `t,x1,...,xd`, one row per grid point, 17 significant
/// digits (round-trip exact for doubles).
void write_path_csv(const Path1& p, std::ostream& os);
void write_path_csv(const Path1& p, const std::string& filename);
Path1 read_path_csv(std::istream& is);
Path1 read_path_csv(const std::string& filename);

/// Area family CSV: header `cell,i,j,value`; volume family: `cell,i,j,k,value`.
void write_area_family_csv(const AreaFamily& f, int d, std::ostream& os);
void write_volume_family_csv(const VolumeFamily& f, int d, std::ostream& os);

/// Every family of a delayed lift into `<dir>/area_v<k>.csv` and
/// `<dir>/volume_v1<k1>_v2<k2>.csv`.
void export_lift_csv(const DelayedLift& lift, const std::string& dir);

/// Audit report CSV: header `identity,residual,scale,relative`.
void write_audit_csv(const AuditReport& rep, std::ostream& os);

/// Monte-Carlo validation rows: header `H,v1,v2,tau,N,mean,stderr,closed_form,z`.
void write_mc_header(std::ostream& os);
void write_mc_row(const McAreaReport& rep, std::ostream& os);
void write_scaling_csv(const ScalingReport& rep, int N, std::ostream& os);

/// Solve report as a flat key-value block (one `key = value` per line).
void write_report_kv(const SolveReport& rep, std::ostream& os);

}  // namespace rough
