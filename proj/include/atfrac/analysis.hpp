#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "atfrac/config.hpp"
#include "atfrac/energy.hpp"
#include "atfrac/evolution.hpp"
#include "atfrac/grid.hpp"

namespace atfrac {

struct LevelSelection {
    int j = 0;
    double level = 0.0;
    double perimeter = 0.0;
    bool certified = false;  ///< perimeter * 2^-(j+1) <= C1
};

/**
 * Perimeter of the superlevel set {v > level}: the number of grid edges whose
 * endpoints fall on different sides of the level, each weighted by the
 * measure of the dual face it crosses (1 in 1D; the transverse dual cell
 * width in 2D, halved on the boundary).
 */
double superlevel_perimeter(const Field& v, double level);

/// For j = 1..jmax, the level in [2^-(j+1), 2^-j] of least perimeter over a 32-point scan.
std::vector<LevelSelection> select_levels(const Field& v, double c1, int jmax);

struct CrackEstimate {
    double threshold = 0.1;
    std::vector<char> indicator;  ///< per cell: min nodal v < threshold
    double mm_measure = 0.0;
    int components = 0;           ///< connected components of the indicator (4-connectivity in 2D)
    std::vector<LevelSelection> levels;

    bool empty() const { return components == 0; }
};

/// Crack indicator and surface estimate; levels are selected when c1 > 0.
CrackEstimate extract_crack(const Field& v, double eps, double threshold = 0.1, double c1 = 0.0, int jmax = 5);

struct OraclePath {
    std::vector<double> t;
    std::vector<double> energy;
    std::optional<double> crack_time;
    double balance_residual = 0.0;  ///< max |E(t) - E(0) - 2 int a a' / L| before the crack
};

/**
 * Limit evolution of a bar of length L fixed at x = 0 with u(L) = a(t):
 * E(t) = min(a(t)^2 / L, toughness). Throws for non-monotone paths.
 */
OraclePath sharp_oracle_1d(const Knots& amplitude, const std::vector<double>& times, double toughness = 1.0,
                           double length = 1.0);

/**
 * Strip of width w and height H with u = -a at the bottom and +a at the top,
 * restricted to a straight horizontal crack: E(t) = min(4 a^2 w / H, toughness w),
 * and a crack once opened stays open.
 */
OraclePath sharp_oracle_strip(double width, const Knots& amplitude, const std::vector<double>& times,
                              double height = 1.0, double toughness = 1.0);

/// Oracle for the geometry a config describes (bar for linear_x in 1D, strip for antiplane_y).
OraclePath oracle_for(const RunConfig& config, const std::vector<double>& times);

/// First logged time whose v has a non-empty crack indicator.
std::optional<double> crack_time(const Trajectory& traj, double threshold);

double sup_gap(const Trajectory& traj, const OraclePath& oracle);

struct SweepRow {
    double eps = 0.0;
    double h = 0.0;
    double delta = 0.0;
    std::optional<double> crack_time;
    double surface_final = 0.0;
    double elliptic_final = 0.0;
    double sup_gap = 0.0;
};

using SweepObserver = std::function<void(const RunConfig& member, const Trajectory& traj)>;

/// Runs one evolution per eps (decreasing list); `observer` sees each member's trajectory.
std::vector<SweepRow> eps_sweep(const RunConfig& base, const std::vector<double>& eps_list,
                                const SweepObserver& observer = {});
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

struct LiminfReport {
    double functional = 0.0;
    double oracle = 0.0;
    double slack = 0.0;
    bool passed = false;
};

/// F_eps(u, v) >= oracle - (0.15 oracle + 0.05).
LiminfReport gamma_liminf_check(const Field& u, const Field& v, const ATParams& params, double oracle_ms_energy);

}  // namespace atfrac
