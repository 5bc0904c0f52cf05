#include "atfrac/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace atfrac {

ProfileKind parse_profile(const std::string& name) {
    if (name == "linear_x") return ProfileKind::LinearX;
    if (name == "antiplane_y") return ProfileKind::AntiplaneY;
    throw InvalidArgument("unknown boundary profile '" + name + "'");
}

std::string profile_name(ProfileKind kind) {
    return kind == ProfileKind::LinearX ? "linear_x" : "antiplane_y";
}

Field make_profile(const GridPtr& grid, ProfileKind kind) {
    if (kind == ProfileKind::AntiplaneY && grid->dim() != 2)
        throw InvalidArgument("antiplane_y profile needs a 2D grid");
    const double lx = grid->extent(0);
    const double ly = grid->dim() == 2 ? grid->extent(1) : 1.0;
    if (kind == ProfileKind::LinearX)
        return Field::from_function(grid, [lx](double x, double) { return x / lx; });
    return Field::from_function(grid, [ly](double, double y) { return 2.0 * y / ly - 1.0; });
}

BoundarySchedule::BoundarySchedule(Field profile, Knots knots)
    : profile_(std::move(profile)), knots_(std::move(knots)) {
    if (knots_.size() < 2) throw InvalidArgument("schedule needs at least two knots");
    if (knots_.front().first != 0.0) throw InvalidArgument("schedule must start at t = 0");
    if (knots_.front().second != 0.0) throw InvalidArgument("schedule amplitude must vanish at t = 0");
    for (size_t k = 1; k < knots_.size(); ++k)
        if (!(knots_[k].first > knots_[k - 1].first))
            throw InvalidArgument("schedule knot times must increase strictly");
    if (knots_.back().first < 1.0) throw InvalidArgument("schedule must cover [0, 1]");
    for (const auto& [t, a] : knots_)
        if (!std::isfinite(t) || !std::isfinite(a)) throw InvalidArgument("schedule knots must be finite");
}

BoundarySchedule BoundarySchedule::ramp(Field profile, double rate) {
    return BoundarySchedule(std::move(profile), {{0.0, 0.0}, {1.0, rate}});
}

double interpolate_knots(const Knots& knots, double t) {
    if (t <= knots.front().first) return knots.front().second;
    if (t >= knots.back().first) return knots.back().second;
    const auto it = std::upper_bound(knots.begin(), knots.end(), t,
                                     [](double value, const auto& knot) { return value < knot.first; });
    const auto& [t1, a1] = *it;
    const auto& [t0, a0] = *(it - 1);
    return a0 + (a1 - a0) * (t - t0) / (t1 - t0);
}

double knots_variation(const Knots& knots, double t0, double t1) {
    double tv = 0.0;
    double prev = interpolate_knots(knots, t0);
    for (const auto& [t, a] : knots) {
        if (t <= t0 || t >= t1) continue;
        tv += std::abs(a - prev);
        prev = a;
    }
    return tv + std::abs(interpolate_knots(knots, t1) - prev);
}

double BoundarySchedule::amplitude(double t) const { return interpolate_knots(knots_, t); }

Field BoundarySchedule::g(double t) const {
    return Field(profile_.grid_ptr(), amplitude(t) * profile_.values());
}

double BoundarySchedule::variation(double t0, double t1) const { return knots_variation(knots_, t0, t1); }

bool BoundarySchedule::monotone() const {
    for (size_t k = 1; k < knots_.size(); ++k)
        if (knots_[k].second < knots_[k - 1].second) return false;
    return true;
}

double BoundarySchedule::max_abs_amplitude() const {
    double m = 0.0;
    for (const auto& [t, a] : knots_) m = std::max(m, std::abs(a));
    return m;
}

namespace {

double snap(double site, double h, int cells) {
    const double k = std::clamp(std::round(site / h), 0.0, static_cast<double>(cells));
    return k * h;
}

double sup_norm(const Field& f) { return f.values().lpNorm<Eigen::Infinity>(); }

}  // namespace

Vector site_distance(const Grid& grid, double site) {
    const int axis = grid.dim() == 2 ? 1 : 0;
    const double s = snap(site, grid.spacing(axis), grid.cells(axis));
    Vector d(grid.node_count());
    for (int n = 0; n < grid.node_count(); ++n) d[n] = std::abs((axis == 1 ? grid.y(n) : grid.x(n)) - s);
    return d;
}

std::vector<int> site_nodes(const Grid& grid, double site) {
    const Vector d = site_distance(grid, site);
    const double tiny = 1e-9 * grid.spacing(grid.dim() == 2 ? 1 : 0);
    std::vector<int> nodes;
    for (int n = 0; n < grid.node_count(); ++n)
        if (d[n] <= tiny) nodes.push_back(n);
    return nodes;
}

Field initial_ceiling(const GridPtr& grid, const std::optional<Notch>& notch) {
    Field ceiling = Field::constant(grid, 1.0);
    if (!notch) return ceiling;
    if (!(notch->value >= 0.0 && notch->value <= 1.0)) throw InvalidArgument("notch value must lie in [0, 1]");
    const Vector d = site_distance(*grid, notch->site);
    const double tiny = 1e-9 * grid->spacing(grid->dim() == 2 ? 1 : 0);
    for (int n = 0; n < grid->node_count(); ++n)
        if (!grid->is_dirichlet(n) && d[n] <= notch->half_width + tiny) ceiling[n] = notch->value;
    return ceiling;
}

double discretization_modulus(const BoundarySchedule& schedule, const ATParams& params) {
    const int steps = step_count(params.delta);
    double worst = 0.0;
    for (int r = 0; r < steps; ++r)
        worst = std::max(worst, schedule.variation(r * params.delta, (r + 1) * params.delta));
    return (1.0 + params.eta) * worst * gradient_norm(schedule.profile());
}

int step_count(double delta) {
    if (!(delta > 0.0)) throw InvalidArgument("time step must be positive");
    return static_cast<int>(std::floor(1.0 / delta + 1e-9));
}

CompetitorOutcome competitor_step(const AMResult& incumbent, const Field& ceiling, const Field& g,
                                  const ATParams& params, double crack_site, double truncation) {
    const Grid& grid = ceiling.grid();
    const std::vector<int> nodes = site_nodes(grid, crack_site);
    const bool interior = std::any_of(nodes.begin(), nodes.end(), [&](int n) { return !grid.is_dirichlet(n); });
    if (!interior) throw InvalidArgument("crack site lies on the Dirichlet boundary");

    // Two cores are tried: the site alone, and the cell next to the site (toward
    // the interior on the far edge). A single-node core gets pinched by the
    // Gauss-point coefficient on fine grids; a one-cell core pays h/(2 eps).
    const int axis = grid.dim() == 2 ? 1 : 0;
    const double h = grid.spacing(axis);
    const double s = std::clamp(std::round(crack_site / h), 0.0, static_cast<double>(grid.cells(axis))) * h;
    const double far = s + h <= grid.extent(axis) + 1e-9 * h ? s + h : s - h;

    CompetitorOutcome out{incumbent, false, std::numeric_limits<double>::infinity()};
    for (const double other : {s, far}) {
        const double lo = std::min(s, other);
        const double hi = std::max(s, other);
        Vector vc(grid.node_count());
        for (int n = 0; n < grid.node_count(); ++n) {
            const double c = axis == 1 ? grid.y(n) : grid.x(n);
            const double dist = std::max({0.0, lo - c, c - hi});
            vc[n] = grid.is_dirichlet(n) ? 1.0 : std::min(ceiling[n], 1.0 - std::exp(-dist / params.eps));
        }
        Field v_candidate(ceiling.grid_ptr(), std::move(vc));

        const QuadraticForm stiff = assemble_weighted_stiffness(grid, v_candidate, params.eta);
        LinearSolve lin = solve_spd(stiff, g, params.tol_lin, &incumbent.u);
        Field u_candidate = std::isfinite(truncation) ? truncate(lin.solution, truncation) : std::move(lin.solution);
        out.candidate_energy = std::min(out.candidate_energy, total_energy(u_candidate, v_candidate, params));

        AMResult relaxed = alternate_minimize(u_candidate, v_candidate, ceiling, g, params, truncation);
        if (relaxed.record.total < out.result.record.total - params.tol_am) {
            out.result = std::move(relaxed);
            out.accepted = true;
        }
    }
    return out;
}

namespace {

AMResult solve_with_strategy(const Field& u0, const Field& v0, const Field& ceiling, const Field& g,
                             const ATParams& params, const Strategy& strategy, bool& accepted) {
    const double level = sup_norm(g);
    AMResult am = alternate_minimize(u0, v0, ceiling, g, params, level);
    accepted = false;
    if (strategy.competitor) {
        if (!strategy.crack_site) throw InvalidArgument("competitor strategy needs a crack site");
        CompetitorOutcome c = competitor_step(am, ceiling, g, params, *strategy.crack_site, level);
        if (c.accepted) {
            am = std::move(c.result);
            accepted = true;
        }
    }
    return am;
}

}  // namespace

EvolutionState init_step(const GridPtr& grid, const BoundarySchedule& schedule, const ATParams& params,
                         const Strategy& strategy) {
    if (!(schedule.profile().grid() == *grid)) throw InvalidArgument("schedule profile lives on a different grid");
    params.validate(grid->dim() == 2 ? std::min(grid->extent(0), grid->extent(1)) : grid->extent(0));
    const Field ceiling = initial_ceiling(grid, strategy.notch);
    const Field g0 = schedule.g(0.0);

    bool accepted = false;
    AMResult am = solve_with_strategy(g0, ceiling, ceiling, g0, params, strategy, accepted);

    EnergyRecord rec = am.record;
    rec.step = 0;
    rec.t = 0.0;
    rec.work_increment = 0.0;
    rec.work_cumulative = 0.0;
    rec.upper_bound = rec.total;
    rec.lower_bound = rec.total;
    rec.competitor_accepted = accepted;

    EvolutionState state{0, 0.0, am.u, am.v, am.v, {rec}, {}, 0.0};
    state.diagnostics.push_back({total_energy(g0, ceiling, params), am.u_residual, am.v_kkt, 0.0});
    return state;
}

EvolutionState advance(const EvolutionState& state, const BoundarySchedule& schedule, const ATParams& params,
                       const Strategy& strategy) {
    const Grid& grid = state.u.grid();
    const int next = state.step + 1;
    const double t0 = state.step * params.delta;
    const double t1 = next * params.delta;
    const Field g0 = schedule.g(t0);
    const Field g1 = schedule.g(t1);

    Field warm(state.u.grid_ptr(), state.u.values() + g1.values() - g0.values());
    for (int n = 0; n < grid.node_count(); ++n)
        if (grid.is_dirichlet(n)) warm[n] = g1[n];
    const double warm_energy = total_energy(warm, state.v, params);

    bool accepted = false;
    AMResult am = solve_with_strategy(warm, state.v, state.v_upper, g1, params, strategy, accepted);

    const EnergyRecord& first = state.log.front();
    const EnergyRecord& prev = state.log.back();
    const double slack_rate = discretization_modulus(schedule, params) * gradient_norm(schedule.profile());
    double variation_sum = 0.0;
    for (int r = 0; r < next; ++r) variation_sum += schedule.variation(r * params.delta, (r + 1) * params.delta);

    EnergyRecord rec = am.record;
    rec.step = next;
    rec.t = t1;
    rec.work_increment = work_increment(state.u, state.v, g0, g1, params.eta);
    rec.work_cumulative = prev.work_cumulative + rec.work_increment;
    const double lower_inc = work_increment(am.u, am.v, g0, g1, params.eta);
    const double lower_cum = state.lower_work_cumulative + lower_inc;
    rec.upper_bound = first.total + rec.work_cumulative + slack_rate * variation_sum;
    rec.lower_bound = first.total + lower_cum - slack_rate * variation_sum;
    rec.competitor_accepted = accepted;
    const double tol = 1e-12 * std::max(1.0, std::abs(rec.upper_bound));
    rec.upper_violated = rec.total > rec.upper_bound + tol;
    rec.lower_violated = rec.total < rec.lower_bound - tol;

    EvolutionState out{next, t1, am.u, am.v, am.v, state.log, state.diagnostics, lower_cum};
    out.log.push_back(rec);
    out.diagnostics.push_back({warm_energy, am.u_residual, am.v_kkt, lower_inc});
    return out;
}

Trajectory run(const GridPtr& grid, const BoundarySchedule& schedule, const ATParams& params,
               const Strategy& strategy) {
    const int steps = step_count(params.delta);
    if (steps < 1) throw InvalidArgument("time step larger than the time interval");
    EvolutionState state = init_step(grid, schedule, params, strategy);
    Trajectory traj;
    traj.u.push_back(state.u);
    traj.v.push_back(state.v);
    for (int k = 0; k < steps; ++k) {
        state = advance(state, schedule, params, strategy);
        traj.u.push_back(state.u);
        traj.v.push_back(state.v);
    }
    traj.records = state.log;
    traj.diagnostics = state.diagnostics;
    return traj;
}

}  // namespace atfrac
