#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "atfrac/config.hpp"
#include "atfrac/evolution.hpp"

namespace atfrac {

inline constexpr const char* kEnergyHeader =
    "step,t,elliptic,surface,total,work_inc,work_cum,upper_bound,lower_bound,am_sweeps,competitor_accepted";

/// Audit slack on the logged displacement residual, in units of tol_lin.
inline constexpr double kResidualSlack = 10.0;
/// Audit bound on the logged projected gradient of the phase problem, in units
/// of sqrt(tol_am). It is measured against the final u, and alternating
/// minimization stops on energy decrease rather than stationarity, so it
/// scales like sqrt(tol_am) rather than tol_qp.
inline constexpr double kKktSlack = 10.0;

void write_energy_csv(std::ostream& out, const std::vector<EnergyRecord>& records);
std::vector<EnergyRecord> read_energy_csv(std::istream& in);

/**
 * Writes a completed run: config.cfg, energy.csv, diagnostics.csv (warm-start
 * energies and subproblem residuals per step), v_history.txt (every phase
 * field, full precision, one step per line) and, when snapshot_every > 0,
 * u_NNNN.txt / v_NNNN.txt field snapshots.
 */
void write_run_directory(const std::string& dir, const RunConfig& config, const Trajectory& traj);

struct Violation {
    int step = -1;
    std::string message;
};

struct AuditReport {
    std::vector<Violation> violations;
    std::vector<std::string> warnings;
    int steps = 0;

    bool ok() const { return violations.empty(); }
};

/// Invariant audit of a run directory written by write_run_directory.
AuditReport audit_run_directory(const std::string& dir);

}  // namespace atfrac
