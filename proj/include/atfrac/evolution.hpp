#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "atfrac/energy.hpp"
#include "atfrac/grid.hpp"
#include "atfrac/solve.hpp"

namespace atfrac {

/// Shape of the imposed displacement: g(t) = a(t) * P.
enum class ProfileKind {
    LinearX,     ///< P = x / Lx: bar pulled at the right end, fixed at the left
    AntiplaneY,  ///< P = 2 y / Ly - 1: antiplane shear, -a at the bottom, +a at the top
};

ProfileKind parse_profile(const std::string& name);
std::string profile_name(ProfileKind kind);
Field make_profile(const GridPtr& grid, ProfileKind kind);

using Knots = std::vector<std::pair<double, double>>;

/// Piecewise linear interpolation through (t, a) knots, constant outside their range.
double interpolate_knots(const Knots& knots, double t);

/// Total variation of the piecewise linear path over [t0, t1].
double knots_variation(const Knots& knots, double t0, double t1);

/**
 * Time-dependent Dirichlet datum g(t) = a(t) P, with a piecewise linear on
 * [0, 1] and a(0) = 0. P is a full nodal field, so g(t) is also an
 * extension of the boundary datum into the domain.
 */
class BoundarySchedule {
public:
    /// Knots (t, a) with strictly increasing t covering [0, 1]; a(0) must be 0.
    BoundarySchedule(Field profile, Knots knots);

    static BoundarySchedule ramp(Field profile, double rate);

    double amplitude(double t) const;
    Field g(double t) const;
    /// Total variation of a over [t0, t1].
    double variation(double t0, double t1) const;
    bool monotone() const;
    double max_abs_amplitude() const;

    const Field& profile() const { return profile_; }
    const Knots& knots() const { return knots_; }

private:
    Field profile_;
    Knots knots_;
};

/// Pre-existing flaw: v_upper(0) = value on nodes within half_width of the site.
struct Notch {
    double site = 0.5;
    double value = 0.9;
    double half_width = 0.0;
};

struct Strategy {
    bool competitor = false;
    std::optional<double> crack_site;  ///< x in 1D, y of a horizontal line in 2D
    std::optional<Notch> notch;
    double threshold = 0.1;            ///< crack indicator level used for logging crack events
};

/// Distance of each node to a site: |x - s| in 1D, |y - s| (horizontal line) in 2D.
Vector site_distance(const Grid& grid, double site);

/// Nodes of the site: the nearest node in 1D, the nearest horizontal grid line in 2D.
std::vector<int> site_nodes(const Grid& grid, double site);

Field initial_ceiling(const GridPtr& grid, const std::optional<Notch>& notch);

struct StepDiagnostics {
    double warm_start_energy = 0.0;  ///< F(u_i + g_{i+1} - g_i, v_i)
    double u_residual = 0.0;
    double v_kkt = 0.0;
    double lower_work_increment = 0.0;
};

struct EvolutionState {
    int step = 0;
    double t = 0.0;
    Field u;
    Field v;
    Field v_upper;  ///< ceiling for the next step, equal to v of the last accepted step
    std::vector<EnergyRecord> log;
    std::vector<StepDiagnostics> diagnostics;
    double lower_work_cumulative = 0.0;
};

/// e(delta) = (1 + eta) max_r integral over step r of |grad g'|_{L2}.
double discretization_modulus(const BoundarySchedule& schedule, const ATParams& params);

/// floor(1 / delta), guarding against round-off in 1 / delta.
int step_count(double delta);

EvolutionState init_step(const GridPtr& grid, const BoundarySchedule& schedule, const ATParams& params,
                         const Strategy& strategy = {});

EvolutionState advance(const EvolutionState& state, const BoundarySchedule& schedule, const ATParams& params,
                       const Strategy& strategy = {});

struct CompetitorOutcome {
    AMResult result;
    bool accepted = false;
    double candidate_energy = 0.0;
};

/**
 * Builds cracked candidates v_c = min(ceiling, 1 - exp(-dist / eps)), with
 * dist measured from the site node and from the cell next to it, solves for u
 * at fixed v_c, relaxes each pair by alternating minimization under the same
 * ceiling, and keeps the best one iff its energy is below the energy of
 * `incumbent` by more than tol_am.
 */
CompetitorOutcome competitor_step(const AMResult& incumbent, const Field& ceiling, const Field& g,
                                  const ATParams& params, double crack_site, double truncation);

struct Trajectory {
    std::vector<Field> u;
    std::vector<Field> v;
    std::vector<EnergyRecord> records;
    std::vector<StepDiagnostics> diagnostics;
};

Trajectory run(const GridPtr& grid, const BoundarySchedule& schedule, const ATParams& params,
               const Strategy& strategy = {});

}  // namespace atfrac
