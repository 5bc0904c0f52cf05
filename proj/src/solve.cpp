#include "atfrac/solve.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include <Eigen/IterativeLinearSolvers>

namespace atfrac {

namespace {

struct Partition {
    std::vector<int> free_of_node;  // -1 for Dirichlet nodes
    std::vector<int> free_nodes;
};

Partition partition(const Grid& grid) {
    Partition p;
    p.free_of_node.assign(grid.node_count(), -1);
    for (int n = 0; n < grid.node_count(); ++n) {
        if (!grid.is_dirichlet(n)) {
            p.free_of_node[n] = static_cast<int>(p.free_nodes.size());
            p.free_nodes.push_back(n);
        }
    }
    return p;
}

// Reduced operator A_ff and right-hand side -(b_f + A_fd x_d).
void reduce(const QuadraticForm& form, const Partition& p, const Vector& x, SparseMatrix& a_ff, Vector& rhs) {
    const int nf = static_cast<int>(p.free_nodes.size());
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(form.A.nonZeros());
    rhs = Vector::Zero(nf);
    for (int f = 0; f < nf; ++f) rhs[f] = -form.b[p.free_nodes[f]];
    for (int col = 0; col < form.A.outerSize(); ++col) {
        for (SparseMatrix::InnerIterator it(form.A, col); it; ++it) {
            const int fr = p.free_of_node[it.row()];
            if (fr < 0) continue;
            const int fc = p.free_of_node[col];
            if (fc >= 0) t.emplace_back(fr, fc, it.value());
            else rhs[fr] -= it.value() * x[col];
        }
    }
    a_ff.resize(nf, nf);
    a_ff.setFromTriplets(t.begin(), t.end());
}

}  // namespace

LinearSolve solve_spd(const QuadraticForm& form, const Field& dirichlet, double tol_lin, const Field* start) {
    const Grid& grid = dirichlet.grid();
    if (form.A.rows() != grid.node_count()) throw InvalidArgument("solve_spd: form size does not match grid");
    const Partition p = partition(grid);
    const int nf = static_cast<int>(p.free_nodes.size());

    Vector x = start ? start->values() : dirichlet.values();
    for (int n = 0; n < grid.node_count(); ++n)
        if (grid.is_dirichlet(n)) x[n] = dirichlet[n];

    LinearSolve out{Field(dirichlet.grid_ptr(), x), 0, 0.0};
    if (nf == 0) return out;

    SparseMatrix a_ff;
    Vector rhs;
    reduce(form, p, x, a_ff, rhs);
    Vector guess(nf);
    for (int f = 0; f < nf; ++f) guess[f] = x[p.free_nodes[f]];

    if (rhs.norm() == 0.0) {
        guess.setZero();
    } else {
        Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper, Eigen::DiagonalPreconditioner<double>> cg;
        cg.setTolerance(tol_lin);
        cg.setMaxIterations(10 * nf);
        cg.compute(a_ff);
        guess = cg.solveWithGuess(rhs, guess);
        out.iterations = static_cast<int>(cg.iterations());
        out.relative_residual = (a_ff * guess - rhs).norm() / rhs.norm();
        if (cg.info() != Eigen::Success || !(out.relative_residual <= tol_lin)) {
            std::ostringstream msg;
            msg << "conjugate gradients did not converge: residual " << out.relative_residual << " after "
                << out.iterations << " iterations (n = " << nf << ")";
            throw SolverError(msg.str());
        }
    }
    for (int f = 0; f < nf; ++f) x[p.free_nodes[f]] = guess[f];
    out.solution = Field(dirichlet.grid_ptr(), std::move(x));
    return out;
}

double spd_residual(const QuadraticForm& form, const Field& x) {
    const Partition p = partition(x.grid());
    if (p.free_nodes.empty()) return 0.0;
    SparseMatrix a_ff;
    Vector rhs;
    reduce(form, p, x.values(), a_ff, rhs);
    Vector xf(p.free_nodes.size());
    for (size_t f = 0; f < p.free_nodes.size(); ++f) xf[f] = x[p.free_nodes[f]];
    const double scale = rhs.norm();
    const double r = (a_ff * xf - rhs).norm();
    return scale > 0.0 ? r / scale : r;
}

namespace {

double projected_sup(const Vector& g, const Vector& x, const Vector& lower, const Vector& upper) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        double pg = g[i];
        if (lower[i] == upper[i]) pg = 0.0;
        else if (x[i] <= lower[i]) pg = std::min(pg, 0.0);
        else if (x[i] >= upper[i]) pg = std::max(pg, 0.0);
        worst = std::max(worst, std::abs(pg));
    }
    return worst;
}

}  // namespace

double projected_gradient_norm(const QuadraticForm& form, const Vector& x, const Vector& lower,
                               const Vector& upper) {
    return projected_sup(form.gradient(x), x, lower, upper);
}

BoxQp solve_box_qp(const QuadraticForm& form, const Vector& lower, const Vector& upper, double tol_qp,
                   const Vector* start, int max_iterations) {
    const Eigen::Index n = lower.size();
    if (upper.size() != n || form.A.rows() != n) throw InvalidArgument("solve_box_qp: size mismatch");
    for (Eigen::Index i = 0; i < n; ++i) {
        if (lower[i] > upper[i]) {
            std::ostringstream msg;
            msg << "solve_box_qp: infeasible box at index " << i << " (" << lower[i] << " > " << upper[i] << ")";
            throw InvalidArgument(msg.str());
        }
    }
    if (max_iterations <= 0) max_iterations = 20000 + 200 * static_cast<int>(n);

    auto project = [&](Vector& z) { z = z.cwiseMax(lower).cwiseMin(upper); };

    BoxQp out;
    out.x = start ? *start : Vector((lower + upper) / 2.0);
    project(out.x);
    Vector g = form.gradient(out.x);

    // Initial step: inverse of the largest diagonal entry (a safe Gershgorin-type scale).
    double diag_max = 0.0;
    for (int k = 0; k < form.A.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(form.A, k); it; ++it)
            if (it.row() == it.col()) diag_max = std::max(diag_max, it.value());
    double alpha = diag_max > 0.0 ? 1.0 / diag_max : 1.0;
    const double alpha_min = 1e-20;
    const double alpha_max = 1e20;

    for (int it = 0;; ++it) {
        out.kkt = projected_sup(g, out.x, lower, upper);
        out.iterations = it;
        if (out.kkt <= tol_qp) {
            // Confirm against a fresh gradient; the running one accumulates rounding.
            g = form.gradient(out.x);
            out.kkt = projected_sup(g, out.x, lower, upper);
            if (out.kkt <= tol_qp) return out;
        }
        if (it >= max_iterations) {
            std::ostringstream msg;
            msg << "projected gradient did not converge: kkt " << out.kkt << " after " << it << " iterations";
            throw SolverError(msg.str());
        }

        Vector trial = out.x - alpha * g;
        project(trial);
        Vector d = trial - out.x;
        const Vector ad = form.A * d;
        const double gd = g.dot(d);
        const double dad = d.dot(ad);
        // Exact minimization of the quadratic on the feasible segment [x, trial].
        double tau = 1.0;
        if (dad > 0.0) tau = std::clamp(-gd / dad, 0.0, 1.0);
        else if (gd >= 0.0) tau = 0.0;
        if (tau == 0.0 || d.lpNorm<Eigen::Infinity>() == 0.0) {
            // Projection arc is flat at this step length; shrink and retry.
            alpha = std::max(alpha_min, alpha * 0.5);
            if (alpha == alpha_min) {
                std::ostringstream msg;
                msg << "projected gradient stalled: kkt " << out.kkt;
                throw SolverError(msg.str());
            }
            continue;
        }
        const Vector s = tau * d;
        const Vector y = tau * ad;
        out.x += s;
        // Keep bounds bitwise after the convex combination.
        project(out.x);
        g += y;
        const double sy = s.dot(y);
        if (sy > 0.0) {
            // Alternate the two Barzilai-Borwein step lengths.
            alpha = (it % 2 == 0) ? s.squaredNorm() / sy : sy / y.squaredNorm();
            alpha = std::clamp(alpha, alpha_min, alpha_max);
        } else {
            alpha = alpha_max;
        }
        if (it % 50 == 49) g = form.gradient(out.x);
    }
}

Field solve_box_qp(const QuadraticForm& form, const Field& lower, const Field& upper, double tol_qp,
                   const Field* start) {
    require_same_grid(lower, upper, "solve_box_qp");
    const Vector* x0 = start ? &start->values() : nullptr;
    BoxQp r = solve_box_qp(form, lower.values(), upper.values(), tol_qp, x0);
    return Field(lower.grid_ptr(), std::move(r.x));
}

namespace {

struct PhaseBox {
    Vector lower;
    Vector upper;
};

PhaseBox phase_box(const Field& v_upper) {
    const Grid& grid = v_upper.grid();
    PhaseBox box{Vector::Zero(grid.node_count()), v_upper.values()};
    for (int n = 0; n < grid.node_count(); ++n) {
        if (grid.is_dirichlet(n)) {
            box.lower[n] = 1.0;
            box.upper[n] = 1.0;
        }
    }
    return box;
}

}  // namespace

AMResult alternate_minimize(const Field& u0, const Field& v0, const Field& v_upper, const Field& g,
                            const ATParams& params, double truncation) {
    require_same_grid(u0, v0, "alternate_minimize");
    require_same_grid(u0, v_upper, "alternate_minimize");
    require_same_grid(u0, g, "alternate_minimize");
    const Grid& grid = u0.grid();
    for (int n = 0; n < grid.node_count(); ++n) {
        if (!(0.0 <= v0[n] && v0[n] <= v_upper[n] && v_upper[n] <= 1.0))
            throw InvalidArgument("alternate_minimize: need 0 <= v0 <= v_upper <= 1");
        if (grid.is_dirichlet(n) && (v_upper[n] != 1.0 || std::abs(u0[n] - g[n]) > 1e-9 * (1.0 + std::abs(g[n]))))
            throw InvalidArgument("alternate_minimize: start violates the Dirichlet data");
    }
    const PhaseBox box = phase_box(v_upper);

    Field u = u0;
    Field v = v0;
    for (int n = 0; n < grid.node_count(); ++n)
        if (grid.is_dirichlet(n)) u[n] = g[n];
    double energy = total_energy(u, v, params);
    int sweep = 0;
    bool converged = false;
    while (sweep < params.max_sweeps) {
        ++sweep;
        const double sweep_start = energy;

        const QuadraticForm stiff = assemble_weighted_stiffness(grid, v, params.eta);
        LinearSolve lin = solve_spd(stiff, g, params.tol_lin, &u);
        Field u_new = std::isfinite(truncation) ? truncate(lin.solution, truncation) : std::move(lin.solution);
        const double e_u = total_energy(u_new, v, params);
        if (e_u <= energy) {
            u = std::move(u_new);
            energy = e_u;
        }

        const QuadraticForm phase = assemble_phase_form(grid, u, params.eps, params.eta);
        BoxQp qp = solve_box_qp(phase, box.lower, box.upper, params.tol_qp, &v.values());
        Field v_new(v.grid_ptr(), std::move(qp.x));
        const double e_v = total_energy(u, v_new, params);
        if (e_v <= energy) {
            v = std::move(v_new);
            energy = e_v;
        }

        if (sweep_start - energy < params.tol_am) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        std::ostringstream msg;
        msg << "alternating minimization hit the sweep cap (" << params.max_sweeps << ") at energy " << energy;
        throw SolverError(msg.str());
    }

    // Final displacement solve so that u is optimal for the returned v.
    {
        const QuadraticForm stiff = assemble_weighted_stiffness(grid, v, params.eta);
        LinearSolve lin = solve_spd(stiff, g, params.tol_lin, &u);
        Field u_new = std::isfinite(truncation) ? truncate(lin.solution, truncation) : std::move(lin.solution);
        const double e_u = total_energy(u_new, v, params);
        if (e_u <= energy) {
            u = std::move(u_new);
            energy = e_u;
        }
    }

    AMResult out{u, v, {}, sweep, 0.0, 0.0};
    out.record.elliptic = elliptic_energy(u, v, params.eta);
    out.record.surface = mm_energy(v, params.eps);
    out.record.total = energy;
    out.record.am_sweeps = sweep;
    out.u_residual = spd_residual(assemble_weighted_stiffness(grid, v, params.eta), u);
    out.v_kkt = projected_gradient_norm(assemble_phase_form(grid, u, params.eps, params.eta), v.values(),
                                        box.lower, box.upper);
    return out;
}

}  // namespace atfrac
