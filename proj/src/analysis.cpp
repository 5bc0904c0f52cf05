#include "atfrac/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <queue>

namespace atfrac {

double superlevel_perimeter(const Field& v, double level) {
    const Grid& g = v.grid();
    auto above = [&](int n) { return v[n] > level; };
    double per = 0.0;
    if (g.dim() == 1) {
        for (int i = 0; i < g.cells(0); ++i)
            if (above(i) != above(i + 1)) per += 1.0;
        return per;
    }
    const int nx = g.cells(0);
    const int ny = g.cells(1);
    auto dual = [](int k, int last, double h) { return (k == 0 || k == last) ? 0.5 * h : h; };
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i < nx; ++i)
            if (above(g.node(i, j)) != above(g.node(i + 1, j))) per += dual(j, ny, g.spacing(1));
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i <= nx; ++i)
            if (above(g.node(i, j)) != above(g.node(i, j + 1))) per += dual(i, nx, g.spacing(0));
    return per;
}

std::vector<LevelSelection> select_levels(const Field& v, double c1, int jmax) {
    constexpr int kScan = 32;
    std::vector<LevelSelection> out;
    for (int j = 1; j <= jmax; ++j) {
        const double lo = std::ldexp(1.0, -(j + 1));
        const double hi = std::ldexp(1.0, -j);
        LevelSelection best{j, lo, std::numeric_limits<double>::infinity(), false};
        for (int k = 0; k < kScan; ++k) {
            const double b = lo + (hi - lo) * k / (kScan - 1);
            const double p = superlevel_perimeter(v, b);
            if (p < best.perimeter) {
                best.level = b;
                best.perimeter = p;
            }
        }
        best.certified = best.perimeter * lo <= c1;
        out.push_back(best);
    }
    return out;
}

CrackEstimate extract_crack(const Field& v, double eps, double threshold, double c1, int jmax) {
    if (!(threshold > 0.0 && threshold < 1.0)) throw InvalidArgument("crack threshold must lie in (0, 1)");
    const Grid& g = v.grid();
    CrackEstimate est;
    est.threshold = threshold;
    est.mm_measure = mm_energy(v, eps);
    est.indicator.assign(g.cell_count(), 0);
    for (int e = 0; e < g.cell_count(); ++e) {
        const auto nodes = g.cell_nodes(e);
        double lo = 1.0;
        for (int a = 0; a < g.nodes_per_cell(); ++a) lo = std::min(lo, v[nodes[a]]);
        est.indicator[e] = lo < threshold ? 1 : 0;
    }

    std::vector<char> seen(g.cell_count(), 0);
    const int cx = g.cells(0);
    const int cy = g.dim() == 2 ? g.cells(1) : 1;
    for (int start = 0; start < g.cell_count(); ++start) {
        if (!est.indicator[start] || seen[start]) continue;
        ++est.components;
        std::queue<int> todo;
        todo.push(start);
        seen[start] = 1;
        while (!todo.empty()) {
            const int e = todo.front();
            todo.pop();
            const int i = e % cx;
            const int j = e / cx;
            const std::array<std::array<int, 2>, 4> steps{{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};
            for (const auto& [di, dj] : steps) {
                const int ni = i + di;
                const int nj = j + dj;
                if (ni < 0 || ni >= cx || nj < 0 || nj >= cy) continue;
                const int ne = nj * cx + ni;
                if (est.indicator[ne] && !seen[ne]) {
                    seen[ne] = 1;
                    todo.push(ne);
                }
            }
        }
    }
    if (c1 > 0.0) est.levels = select_levels(v, c1, jmax);
    return est;
}

namespace {

// First time at which |a| reaches `level`, by exact search on the linear pieces.
std::optional<double> first_crossing(const Knots& a, double level) {
    if (std::abs(a.front().second) >= level) return a.front().first;
    for (size_t k = 1; k < a.size(); ++k) {
        const auto [t0, a0] = a[k - 1];
        const auto [t1, a1] = a[k];
        if (std::abs(a1) < level) continue;
        // |a| crosses level inside (t0, t1]; a is linear so solve a(t) = +-level.
        const double target = a1 >= 0.0 ? level : -level;
        const double s = (a1 == a0) ? 1.0 : std::clamp((target - a0) / (a1 - a0), 0.0, 1.0);
        return t0 + s * (t1 - t0);
    }
    return std::nullopt;
}

OraclePath irreversible_path(const Knots& a, const std::vector<double>& times, double stiffness,
                             double crack_energy) {
    // Uncracked energy is stiffness * a^2, cracked energy is crack_energy.
    OraclePath path;
    path.crack_time = first_crossing(a, std::sqrt(crack_energy / stiffness));
    const double g = 1.0 / std::sqrt(3.0);
    for (double t : times) {
        const bool cracked = path.crack_time && t >= *path.crack_time;
        const double at = interpolate_knots(a, t);
        const double e = cracked ? crack_energy : std::min(stiffness * at * at, crack_energy);
        path.t.push_back(t);
        path.energy.push_back(e);
        if (cracked) continue;
        // Work identity: E(t) - E(0) = 2 stiffness * int_0^t a a' ds, by 2-point Gauss per piece.
        double work = 0.0;
        double s0 = 0.0;
        for (size_t k = 1; k <= a.size() && s0 < t; ++k) {
            const double s1 = k < a.size() ? std::min(a[k].first, t) : t;
            if (s1 <= s0) continue;
            const double slope = k < a.size() ? (a[k].second - a[k - 1].second) / (a[k].first - a[k - 1].first) : 0.0;
            const double mid = 0.5 * (s0 + s1);
            const double half = 0.5 * (s1 - s0);
            for (double xi : {-g, g}) work += half * 2.0 * stiffness * interpolate_knots(a, mid + half * xi) * slope;
            s0 = s1;
        }
        const double e0 = stiffness * a.front().second * a.front().second;
        path.balance_residual = std::max(path.balance_residual, std::abs(e - e0 - work));
    }
    return path;
}

}  // namespace

OraclePath sharp_oracle_1d(const Knots& amplitude, const std::vector<double>& times, double toughness,
                           double length) {
    if (amplitude.size() < 2) throw InvalidArgument("oracle: amplitude needs two knots");
    for (size_t k = 1; k < amplitude.size(); ++k)
        if (amplitude[k].second < amplitude[k - 1].second)
            throw InvalidArgument("oracle: only monotone non-decreasing ramps are supported");
    return irreversible_path(amplitude, times, 1.0 / length, toughness);
}

OraclePath sharp_oracle_strip(double width, const Knots& amplitude, const std::vector<double>& times,
                              double height, double toughness) {
    if (amplitude.size() < 2) throw InvalidArgument("oracle: amplitude needs two knots");
    return irreversible_path(amplitude, times, 4.0 * width / height, toughness * width);
}

OraclePath oracle_for(const RunConfig& config, const std::vector<double>& times) {
    const Knots a = config.schedule_kind == "table" ? config.table : Knots{{0.0, 0.0}, {1.0, config.rate}};
    if (config.dim == 1 && config.profile == ProfileKind::LinearX)
        return sharp_oracle_1d(a, times, 1.0, config.extent[0]);
    if (config.dim == 2 && config.profile == ProfileKind::AntiplaneY)
        return sharp_oracle_strip(config.extent[0], a, times, config.extent[1]);
    throw InvalidArgument("oracle: no sharp-interface oracle for this geometry");
}

std::optional<double> crack_time(const Trajectory& traj, double threshold) {
    for (size_t i = 0; i < traj.v.size(); ++i)
        if (traj.v[i].values().minCoeff() < threshold) return traj.records[i].t;
    return std::nullopt;
}

double sup_gap(const Trajectory& traj, const OraclePath& oracle) {
    if (oracle.energy.size() != traj.records.size()) throw InvalidArgument("sup_gap: oracle sampled on a different time grid");
    double gap = 0.0;
    for (size_t i = 0; i < traj.records.size(); ++i)
        gap = std::max(gap, std::abs(traj.records[i].total - oracle.energy[i]));
    return gap;
}

std::vector<SweepRow> eps_sweep(const RunConfig& base, const std::vector<double>& eps_list,
                                const SweepObserver& observer) {
    if (eps_list.empty()) throw InvalidArgument("sweep: empty eps list");
    for (size_t k = 1; k < eps_list.size(); ++k)
        if (!(eps_list[k] < eps_list[k - 1])) throw InvalidArgument("sweep: eps list must be decreasing");
    RunConfig config = base;
    config.eps = eps_list;
    std::vector<SweepRow> rows;
    for (const RunConfig& member : expand_sweep(config)) {
        const GridPtr grid = make_grid(member);
        const ATParams params = make_params(member);
        const Trajectory traj = run(grid, make_schedule(member, grid), params, make_strategy(member));
        if (observer) observer(member, traj);
        std::vector<double> times;
        for (const auto& r : traj.records) times.push_back(r.t);
        SweepRow row;
        row.eps = params.eps;
        row.h = grid->spacing(0);
        row.delta = params.delta;
        row.crack_time = crack_time(traj, member.threshold);
        row.surface_final = traj.records.back().surface;
        row.elliptic_final = traj.records.back().elliptic;
        row.sup_gap = sup_gap(traj, oracle_for(member, times));
        rows.push_back(row);
    }
    return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << "eps,h,delta,crack_time,surface_final,elliptic_final,sup_gap\n";
    out << std::setprecision(12);
    for (const auto& r : rows) {
        out << r.eps << ',' << r.h << ',' << r.delta << ',';
        if (r.crack_time) out << *r.crack_time;
        else out << "nan";
        out << ',' << r.surface_final << ',' << r.elliptic_final << ',' << r.sup_gap << '\n';
    }
}

LiminfReport gamma_liminf_check(const Field& u, const Field& v, const ATParams& params, double oracle_ms_energy) {
    LiminfReport r;
    r.functional = total_energy(u, v, params);
    r.oracle = oracle_ms_energy;
    r.slack = 0.15 * oracle_ms_energy + 0.05;
    r.passed = r.functional >= r.oracle - r.slack;
    return r;
}

}  // namespace atfrac
