#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "atfrac/energy.hpp"
#include "atfrac/evolution.hpp"
#include "atfrac/grid.hpp"

namespace atfrac {

/**
 * Run configuration read from a flat key-value file with section headers:
 *
 *   [grid]      dim, extent, cells, dirichlet
 *   [schedule]  kind (ramp | table), rate, table, profile
 *   [params]    eps (one value, or a list for sweeps), eta, delta,
 *               tol_am, tol_lin, tol_qp, max_sweeps
 *   [strategy]  competitor, crack_site, notch_site, notch_value, notch_width, threshold
 *   [output]    dir, snapshot_every
 *
 * Optional keys left out of the file stay unset here and are derived when
 * the run is materialized: cells from h = eps / 5, eta = eps^2 / 10,
 * delta = eps / 2, tol_am = 1e-8 |Omega|.
 */
struct RunConfig {
    int dim = 1;
    std::array<double, 2> extent{1.0, 1.0};
    std::optional<std::array<int, 2>> cells;
    std::vector<Face> dirichlet;

    std::string schedule_kind = "ramp";
    double rate = 1.0;
    Knots table;
    ProfileKind profile = ProfileKind::LinearX;

    std::vector<double> eps;
    std::optional<double> eta;
    std::optional<double> delta;
    std::optional<double> tol_am;
    double tol_lin = 1e-10;
    double tol_qp = 1e-10;
    int max_sweeps = 200;

    bool competitor = false;
    std::optional<double> crack_site;
    std::optional<Notch> notch;
    double threshold = 0.1;

    std::string out_dir = "out";
    int snapshot_every = 0;

    std::vector<std::string> warnings;

    bool operator==(const RunConfig& other) const;
};

RunConfig parse_config(const std::string& path);
RunConfig parse_config_text(const std::string& text);
std::string write_config(const RunConfig& config);

/// One config per eps value with h, delta and eta derived for that eps when not pinned.
std::vector<RunConfig> expand_sweep(const RunConfig& config);

/// Materialization of a single-eps config.
GridPtr make_grid(const RunConfig& config);
ATParams make_params(const RunConfig& config);
BoundarySchedule make_schedule(const RunConfig& config, const GridPtr& grid);
Strategy make_strategy(const RunConfig& config);

}  // namespace atfrac
