#include "atfrac/energy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace atfrac {

ATParams ATParams::with_defaults(double eps, double domain_measure) {
    ATParams p;
    p.eps = eps;
    p.eta = eps * eps / 10.0;
    p.delta = eps / 2.0;
    p.tol_am = 1e-8 * domain_measure;
    return p;
}

void ATParams::validate(double min_extent) const {
    std::ostringstream msg;
    if (!(eps > 0.0)) msg << "eps must be positive";
    else if (!(eta > 0.0)) msg << "eta must be positive";
    else if (!(eta < eps)) msg << "eta (" << eta << ") must be smaller than eps (" << eps << ")";
    else if (!(eps < min_extent)) msg << "eps must be smaller than the domain extent";
    else if (!(delta > 0.0)) msg << "delta must be positive";
    else if (!(tol_am > 0.0 && tol_lin > 0.0 && tol_qp > 0.0)) msg << "tolerances must be positive";
    else if (max_sweeps < 1) msg << "max_sweeps must be at least 1";
    else return;
    throw InvalidArgument(msg.str());
}

namespace {

struct Gauss {
    std::array<double, 2> grad{0.0, 0.0};
    double value = 0.0;
};

Gauss at(const CellQuadrature& rule, int q, const std::array<int, 4>& nodes, const Vector& f, int dim) {
    Gauss g;
    for (int a = 0; a < rule.locals; ++a) {
        const double fa = f[nodes[a]];
        g.value += rule.phi[q][a] * fa;
        for (int d = 0; d < dim; ++d) g.grad[d] += rule.grad[q][a][d] * fa;
    }
    return g;
}

double dot(const Gauss& a, const Gauss& b) { return a.grad[0] * b.grad[0] + a.grad[1] * b.grad[1]; }

// Sum over cells and Gauss points of weight * kernel(q, nodes).
template <class Kernel>
double integrate(const Grid& grid, Kernel&& kernel) {
    const CellQuadrature rule(grid);
    double sum = 0.0;
    for (int e = 0; e < grid.cell_count(); ++e) {
        const auto nodes = grid.cell_nodes(e);
        for (int q = 0; q < rule.points; ++q) sum += rule.weight[q] * kernel(rule, q, nodes);
    }
    return sum;
}

}  // namespace

double elliptic_energy(const Field& u, const Field& v, double eta) {
    require_same_grid(u, v, "elliptic_energy");
    const int dim = u.grid().dim();
    return integrate(u.grid(), [&](const CellQuadrature& rule, int q, const std::array<int, 4>& nodes) {
        const Gauss gu = at(rule, q, nodes, u.values(), dim);
        const Gauss gv = at(rule, q, nodes, v.values(), dim);
        return (eta + gv.value * gv.value) * dot(gu, gu);
    });
}

double mm_energy(const Field& v, double eps) {
    const int dim = v.grid().dim();
    return integrate(v.grid(), [&](const CellQuadrature& rule, int q, const std::array<int, 4>& nodes) {
        const Gauss gv = at(rule, q, nodes, v.values(), dim);
        const double r = 1.0 - gv.value;
        return 0.5 * eps * dot(gv, gv) + 0.5 * r * r / eps;
    });
}

double total_energy(const Field& u, const Field& v, const ATParams& params) {
    return elliptic_energy(u, v, params.eta) + mm_energy(v, params.eps);
}

double work_increment(const Field& u, const Field& v, const Field& g_prev, const Field& g_next,
                      double eta) {
    require_same_grid(u, v, "work_increment");
    require_same_grid(u, g_prev, "work_increment");
    require_same_grid(u, g_next, "work_increment");
    const Vector dg = g_next.values() - g_prev.values();
    const int dim = u.grid().dim();
    return 2.0 * integrate(u.grid(), [&](const CellQuadrature& rule, int q, const std::array<int, 4>& nodes) {
        const Gauss gu = at(rule, q, nodes, u.values(), dim);
        const Gauss gv = at(rule, q, nodes, v.values(), dim);
        const Gauss gd = at(rule, q, nodes, dg, dim);
        return (eta + gv.value * gv.value) * dot(gu, gd);
    });
}

double weighted_dirichlet(const Field& w, const Field& v, double eta) {
    return elliptic_energy(w, v, eta);
}

double gradient_norm(const Field& f) {
    const int dim = f.grid().dim();
    const double sq = integrate(f.grid(), [&](const CellQuadrature& rule, int q, const std::array<int, 4>& nodes) {
        const Gauss g = at(rule, q, nodes, f.values(), dim);
        return dot(g, g);
    });
    return std::sqrt(sq);
}

double coarea_integral(const Field& v) {
    const int dim = v.grid().dim();
    return integrate(v.grid(), [&](const CellQuadrature& rule, int q, const std::array<int, 4>& nodes) {
        const Gauss g = at(rule, q, nodes, v.values(), dim);
        return (1.0 - g.value) * std::sqrt(dot(g, g));
    });
}

Field truncate(const Field& u, double level) {
    Vector clipped = u.values().cwiseMax(-level).cwiseMin(level);
    return Field(u.grid_ptr(), std::move(clipped));
}

}  // namespace atfrac
