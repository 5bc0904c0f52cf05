// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "atfrac/analysis.hpp"
#include "atfrac/solve.hpp"
#include "oracles.hpp"

using namespace atfrac;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct NamedRun {
    std::string name;
    Trajectory traj;
    double eps = 0.0;
};

struct Line {
    int id;
    bool pass;
    std::string title;
    std::string detail;
};

std::vector<Line> lines;

void report(int id, bool pass, const std::string& title, const std::string& detail) {
    lines.push_back({id, pass, title, detail});
}

std::string fmt(const char* pattern, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, pattern, args...);
    return buf;
}

RunConfig notched_bar(double rate) {
    RunConfig c;
    c.dim = 1;
    c.extent = {1.0, 1.0};
    c.dirichlet = {Face::Left, Face::Right};
    c.rate = rate;
    c.competitor = true;
    c.crack_site = 0.5;
    c.notch = Notch{0.5, 0.9, 0.0};
    return c;
}

Trajectory run_config(const RunConfig& c) {
    const RunConfig m = expand_sweep(c).front();
    const GridPtr grid = make_grid(m);
    return run(grid, make_schedule(m, grid), make_params(m), make_strategy(m));
}

// Criterion 3: projected-gradient box QP against the dense active-set oracle.
void box_qp_oracle() {
    const auto start = Clock::now();
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst_x = 0.0, worst_e = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const int cells = 1 + trial % 49;
        const auto grid = build_grid(1, {1.0, 0.0}, {cells, 0}, {Face::Left});
        const double eps = 0.02 + 0.2 * unit(rng);
        Vector u(grid->node_count()), lower(grid->node_count()), upper(grid->node_count());
        for (int n = 0; n < grid->node_count(); ++n) {
            u[n] = 4.0 * (unit(rng) - 0.5);
            upper[n] = unit(rng) < 0.3 ? 1.0 : unit(rng);
            lower[n] = 0.0;
        }
        const QuadraticForm form = assemble_phase_form(*grid, Field(grid, u), eps, eps * eps / 10);
        const BoxQp qp = solve_box_qp(form, lower, upper, 1e-12);
        const Vector ref = oracle::active_set_qp(oracle::Mat(form.A), form.b, lower, upper);
        worst_x = std::max(worst_x, (qp.x - ref).lpNorm<Eigen::Infinity>());
        const double e = form.evaluate(qp.x);
        const double e_ref = form.evaluate(ref);
        worst_e = std::max(worst_e, std::abs(e - e_ref) / std::max(1.0, std::abs(e_ref)));
    }
    const double t = seconds_since(start);
    report(3, worst_x <= 1e-6 && worst_e <= 1e-10 && t < 60.0, "box QP vs dense active-set oracle",
           fmt("50 instances, max |x - x*| = %.2e, max energy gap = %.2e (%.1f s)", worst_x, worst_e, t));
}

// Criterion 4: central differences of total_energy against the assembled forms.
void gradient_checks() {
    const auto start = Clock::now();
    std::mt19937 rng(4242);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const auto grid = trial % 2 == 0 ? build_grid(1, {1.0, 0.0}, {20 + trial, 0}, {Face::Left, Face::Right})
                                         : build_grid(2, {1.0, 1.0}, {6 + trial / 2, 5}, {Face::Bottom, Face::Top});
        ATParams p = ATParams::with_defaults(0.05 + 0.1 * unit(rng));
        const int n = grid->node_count();
        Vector u(n), v(n), du(n), dv(n);
        for (int k = 0; k < n; ++k) {
            u[k] = 2.0 * unit(rng) - 1.0;
            v[k] = unit(rng);
            du[k] = 2.0 * unit(rng) - 1.0;
            dv[k] = 2.0 * unit(rng) - 1.0;
        }
        const Field U(grid, u), V(grid, v);
        const double h = 1e-5;
        const double fd_u = (total_energy(Field(grid, u + h * du), V, p) - total_energy(Field(grid, u - h * du), V, p)) / (2 * h);
        const double an_u = assemble_weighted_stiffness(*grid, V, p.eta).gradient(u).dot(du);
        const double fd_v = (total_energy(U, Field(grid, v + h * dv), p) - total_energy(U, Field(grid, v - h * dv), p)) / (2 * h);
        const double an_v = assemble_phase_form(*grid, U, p.eps, p.eta).gradient(v).dot(dv);
        worst = std::max(worst, std::abs(fd_u - an_u) / std::abs(an_u));
        worst = std::max(worst, std::abs(fd_v - an_v) / std::abs(an_v));
    }
    const double t = seconds_since(start);
    report(4, worst <= 1e-6 && t < 60.0, "gradient checks",
           fmt("20 states (1D and 2D), max relative mismatch = %.2e (%.1f s)", worst, t));
}

// Criterion 5: energy balance below cracking under time-step halving.
void energy_balance(std::vector<NamedRun>& runs) {
    const auto start = Clock::now();
    std::vector<double> mismatch, final_energy;
    for (double delta : {0.02, 0.01, 0.005}) {
        RunConfig c = notched_bar(0.5);
        c.competitor = false;
        c.crack_site.reset();
        c.notch.reset();
        c.eps = {0.05};
        c.delta = delta;
        Trajectory traj = run_config(c);
        const auto& first = traj.records.front();
        const auto& last = traj.records.back();
        mismatch.push_back(std::abs(last.total - first.total - last.work_cumulative));
        final_energy.push_back(last.total);
        runs.push_back({fmt("balance delta=%g", delta), std::move(traj), 0.05});
    }
    const double r1 = mismatch[1] / mismatch[0];
    const double r2 = mismatch[2] / mismatch[1];
    const double rel = mismatch[2] / final_energy[2];
    const double t = seconds_since(start);
    report(5, r1 <= 0.6 && r2 <= 0.6 && rel <= 0.05 && t < 60.0, "energy balance under delta halving",
           fmt("mismatch %.3e, %.3e, %.3e; ratios %.3f, %.3f; final %.2f%% of E (%.1f s)", mismatch[0], mismatch[1],
               mismatch[2], r1, r2, 100 * rel, t));
}

// Criteria 6 and 7: eps sweep of the notched bar.
void sweep(std::vector<NamedRun>& runs) {
    const auto start = Clock::now();
    const RunConfig base = notched_bar(1.2);
    std::vector<Trajectory> trajs;
    const auto rows = eps_sweep(base, {0.08, 0.04, 0.02},
                                [&](const RunConfig&, const Trajectory& traj) { trajs.push_back(traj); });
    const double t = seconds_since(start);

    const Trajectory& fine = trajs.back();
    const Field& v_final = fine.v.back();
    const double mm = mm_energy(v_final, 0.02);
    const bool developed = v_final.values().minCoeff() < 0.1;
    const double h = rows.back().h;
    report(6, developed && mm >= 0.85 && mm <= 1.15 && std::abs(h - 0.02 / 5) < 1e-12, "surface-energy calibration",
           fmt("eps=0.02, h=%.4g: min v = %.2e, mm_energy = %.4f", h, v_final.values().minCoeff(), mm));

    const auto ct = rows.back().crack_time;
    const bool timing = ct && *ct >= 0.8 && *ct <= 1.2;
    const bool decreasing = rows[1].sup_gap < rows[0].sup_gap && rows[2].sup_gap < rows[1].sup_gap;
    std::string gaps;
    for (const auto& r : rows) gaps += fmt("%.4f ", r.sup_gap);
    report(7, timing && decreasing && t < 120.0, "sharp-limit crack timing",
           fmt("a(t)=1.2t, oracle crack t=%.3f; crack_time(0.02) = %s; sup-gap %s(%.1f s)", 1.0 / 1.2,
               ct ? fmt("%.3f", *ct).c_str() : "none", gaps.c_str(), t));
    for (size_t k = 0; k < trajs.size(); ++k)
        runs.push_back({fmt("bar eps=%g", rows[k].eps), std::move(trajs[k]), rows[k].eps});
}

// Criterion 8: antiplane strip.
void strip(std::vector<NamedRun>& runs) {
    const auto start = Clock::now();
    RunConfig c;
    c.dim = 2;
    c.extent = {1.0, 1.0};
    c.cells = std::array<int, 2>{64, 64};
    c.dirichlet = {Face::Bottom, Face::Top};
    c.profile = ProfileKind::AntiplaneY;
    c.rate = 1.0;
    c.eps = {0.05};
    c.competitor = true;
    c.crack_site = 0.5;
    Trajectory traj = run_config(c);
    const double t = seconds_since(start);
    const auto ct = crack_time(traj, 0.1);
    const double final_total = traj.records.back().total;
    report(8, ct && *ct >= 0.35 && *ct <= 0.65 && std::abs(final_total - 1.0) <= 0.3 && t < 600.0, "2D strip",
           fmt("64x64, eps=0.05: crack_time = %s (oracle 0.5), final energy = %.4f (%.1f s)",
               ct ? fmt("%.3f", *ct).c_str() : "none", final_total, t));
    runs.push_back({"strip", std::move(traj), 0.05});
}

void per_run_invariants(const std::vector<NamedRun>& runs) {
    // 1: irreversibility, bitwise.
    {
        int steps = 0;
        std::string first_breach;
        for (const auto& r : runs) {
            for (size_t i = 1; i < r.traj.v.size(); ++i, ++steps) {
                const Vector& prev = r.traj.v[i - 1].values();
                const Vector& cur = r.traj.v[i].values();
                for (int n = 0; n < cur.size(); ++n)
                    if (cur[n] > prev[n] && first_breach.empty())
                        first_breach = fmt("%s step %zu node %d", r.name.c_str(), i, n);
            }
        }
        report(1, first_breach.empty(), "irreversibility",
               first_breach.empty() ? fmt("%zu runs, %d steps, v_{i+1} <= v_i at every node", runs.size(), steps)
                                    : "breach at " + first_breach);
    }
    // 2: per-step energy estimate against the warm start.
    {
        double worst = -std::numeric_limits<double>::infinity();
        int steps = 0;
        for (const auto& r : runs)
            for (size_t i = 1; i < r.traj.records.size(); ++i, ++steps)
                worst = std::max(worst, r.traj.records[i].total - r.traj.diagnostics[i].warm_start_energy);
        report(2, worst <= 1e-12, "per-step energy estimate",
               fmt("%d steps, max F(u_i+1, v_i+1) - F(u_i + dg, v_i) = %.3e", steps, worst));
    }
    // 9: coarea certificates on every post-crack phase field.
    {
        int fields = 0;
        bool ok = true;
        double worst_ratio = 0.0;
        for (const auto& r : runs) {
            for (size_t i = 0; i < r.traj.v.size(); ++i) {
                if (r.traj.v[i].values().minCoeff() >= 0.1) continue;
                ++fields;
                const double c1 = r.traj.records[i].upper_bound;
                for (const auto& l : select_levels(r.traj.v[i], c1, 5)) {
                    ok = ok && l.certified && l.perimeter * std::ldexp(1.0, -(l.j + 1)) <= c1;
                    worst_ratio = std::max(worst_ratio, l.perimeter * std::ldexp(1.0, -(l.j + 1)) / c1);
                }
            }
        }
        report(9, ok && fields > 0, "coarea certificates",
               fmt("%d post-crack fields, j <= 5, max perimeter 2^-(j+1) / C1 = %.3f", fields, worst_ratio));
    }
    // 10: monotone surface energy.
    {
        double worst = 0.0;
        int steps = 0;
        for (const auto& r : runs)
            for (size_t i = 1; i < r.traj.records.size(); ++i, ++steps)
                worst = std::max(worst, r.traj.records[i - 1].surface - r.traj.records[i].surface);
        report(10, worst <= 1e-8, "surface energy monotone", fmt("%d steps, max decrease = %.3e", steps, worst));
    }
}

}  // namespace

int main() {
    std::printf("atfrac acceptance suite\n");
    std::vector<NamedRun> runs;
    box_qp_oracle();
    gradient_checks();
    energy_balance(runs);
    sweep(runs);
    strip(runs);
    per_run_invariants(runs);
    std::sort(lines.begin(), lines.end(), [](const Line& a, const Line& b) { return a.id < b.id; });
    int failures = 0;
    for (const auto& l : lines) {
        if (!l.pass) ++failures;
        std::printf("%s  %2d  %-34s %s\n", l.pass ? "PASS" : "FAIL", l.id, l.title.c_str(), l.detail.c_str());
    }
    std::printf("%d of %zu criteria failed\n", failures, lines.size());
    return failures == 0 ? 0 : 1;
}
