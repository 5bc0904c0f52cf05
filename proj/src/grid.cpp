#include "atfrac/grid.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace atfrac {

Face parse_face(const std::string& name) {
    if (name == "left") return Face::Left;
    if (name == "right") return Face::Right;
    if (name == "bottom") return Face::Bottom;
    if (name == "top") return Face::Top;
    throw InvalidArgument("unknown boundary face '" + name + "'");
}

std::string face_name(Face face) {
    switch (face) {
        case Face::Left: return "left";
        case Face::Right: return "right";
        case Face::Bottom: return "bottom";
        case Face::Top: return "top";
    }
    return "?";
}

Grid::Grid(int dim, std::array<double, 2> extents, std::array<int, 2> cells,
           const std::vector<Face>& dirichlet_faces)
    : dim_(dim), extents_(extents), cells_(cells), faces_(dirichlet_faces) {
    if (dim != 1 && dim != 2) throw InvalidArgument("grid dimension must be 1 or 2");
    if (dim == 1) {
        extents_[1] = 0.0;
        cells_[1] = 0;
    }
    for (int d = 0; d < dim; ++d) {
        if (!(extents_[d] > 0.0) || !std::isfinite(extents_[d]))
            throw InvalidArgument("grid extent must be positive");
        if (cells_[d] < 1) throw InvalidArgument("grid needs at least one cell per axis");
        spacing_[d] = extents_[d] / cells_[d];
    }
    if (dim == 1) spacing_[1] = 0.0;

    dirichlet_.assign(node_count(), 0);
    for (Face f : faces_) {
        if (dim == 1 && (f == Face::Bottom || f == Face::Top))
            throw InvalidArgument("face '" + face_name(f) + "' does not exist in 1D");
        for (int n = 0; n < node_count(); ++n) {
            const int i = node_i(n);
            const int j = node_j(n);
            const bool on = (f == Face::Left && i == 0) || (f == Face::Right && i == cells_[0]) ||
                            (f == Face::Bottom && j == 0) || (f == Face::Top && j == cells_[1]);
            if (on) dirichlet_[n] = 1;
        }
    }
    if (dirichlet_count() == 0) throw InvalidArgument("dirichlet specification selects no nodes");
}

int Grid::dirichlet_count() const {
    return static_cast<int>(std::count(dirichlet_.begin(), dirichlet_.end(), 1));
}

std::array<int, 4> Grid::cell_nodes(int cell) const {
    if (dim_ == 1) return {cell, cell + 1, -1, -1};
    const int i = cell % cells_[0];
    const int j = cell / cells_[0];
    return {node(i, j), node(i + 1, j), node(i, j + 1), node(i + 1, j + 1)};
}

bool Grid::operator==(const Grid& other) const {
    return dim_ == other.dim_ && extents_ == other.extents_ && cells_ == other.cells_ &&
           dirichlet_ == other.dirichlet_;
}

GridPtr build_grid(int dim, std::array<double, 2> extents, std::array<int, 2> cells,
                   const std::vector<Face>& dirichlet_faces) {
    return std::make_shared<const Grid>(dim, extents, cells, dirichlet_faces);
}

CellQuadrature::CellQuadrature(const Grid& grid) {
    const double g0 = 0.5 - 0.5 / std::sqrt(3.0);
    const std::array<double, 2> xi{g0, 1.0 - g0};
    const double hx = grid.spacing(0);
    if (grid.dim() == 1) {
        points = 2;
        locals = 2;
        for (int q = 0; q < 2; ++q) {
            weight[q] = 0.5 * hx;
            phi[q][0] = 1.0 - xi[q];
            phi[q][1] = xi[q];
            grad[q][0][0] = -1.0 / hx;
            grad[q][1][0] = 1.0 / hx;
        }
        return;
    }
    const double hy = grid.spacing(1);
    points = 4;
    locals = 4;
    for (int qy = 0; qy < 2; ++qy) {
        for (int qx = 0; qx < 2; ++qx) {
            const int q = qy * 2 + qx;
            const double s = xi[qx];
            const double t = xi[qy];
            weight[q] = 0.25 * hx * hy;
            const std::array<double, 2> nx{1.0 - s, s};
            const std::array<double, 2> ny{1.0 - t, t};
            const std::array<double, 2> dnx{-1.0 / hx, 1.0 / hx};
            const std::array<double, 2> dny{-1.0 / hy, 1.0 / hy};
            for (int b = 0; b < 2; ++b) {
                for (int a = 0; a < 2; ++a) {
                    const int loc = b * 2 + a;
                    phi[q][loc] = nx[a] * ny[b];
                    grad[q][loc][0] = dnx[a] * ny[b];
                    grad[q][loc][1] = nx[a] * dny[b];
                }
            }
        }
    }
}

Field::Field(GridPtr grid, Vector values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (!grid_) throw InvalidArgument("field without grid");
    if (values_.size() != grid_->node_count())
        throw InvalidArgument("field size does not match grid node count");
}

Field Field::constant(GridPtr grid, double value) {
    const int n = grid->node_count();
    return Field(std::move(grid), Vector::Constant(n, value));
}

Field Field::from_function(GridPtr grid, const std::function<double(double, double)>& f) {
    Vector values(grid->node_count());
    for (int n = 0; n < grid->node_count(); ++n) values[n] = f(grid->x(n), grid->y(n));
    return Field(std::move(grid), std::move(values));
}

bool same_grid(const Field& a, const Field& b) {
    return a.grid_ptr() == b.grid_ptr() || a.grid() == b.grid();
}

void require_same_grid(const Field& a, const Field& b, const char* what) {
    if (!same_grid(a, b)) throw InvalidArgument(std::string(what) + ": fields live on different grids");
}

void validate_phase_field(const Field& v) {
    for (int n = 0; n < v.size(); ++n) {
        if (!(v[n] >= 0.0 && v[n] <= 1.0)) {
            std::ostringstream msg;
            msg << "phase field value " << v[n] << " at node " << n << " outside [0, 1]";
            throw InvalidArgument(msg.str());
        }
    }
}

double QuadraticForm::evaluate(const Vector& z) const {
    return 0.5 * z.dot(A * z) + b.dot(z) + c;
}

Vector QuadraticForm::gradient(const Vector& z) const { return A * z + b; }

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

SparseMatrix from_triplets(int n, const Triplets& t) {
    SparseMatrix m(n, n);
    m.setFromTriplets(t.begin(), t.end());
    return m;
}

double interpolate(const CellQuadrature& rule, int q, const std::array<int, 4>& nodes,
                   const Vector& values) {
    double s = 0.0;
    for (int a = 0; a < rule.locals; ++a) s += rule.phi[q][a] * values[nodes[a]];
    return s;
}

double grad_dot(const CellQuadrature& rule, int q, int a, int b, int dim) {
    double s = 0.0;
    for (int d = 0; d < dim; ++d) s += rule.grad[q][a][d] * rule.grad[q][b][d];
    return s;
}

double grad_sq(const CellQuadrature& rule, int q, const std::array<int, 4>& nodes,
               const Vector& values, int dim) {
    std::array<double, 2> g{0.0, 0.0};
    for (int a = 0; a < rule.locals; ++a)
        for (int d = 0; d < dim; ++d) g[d] += rule.grad[q][a][d] * values[nodes[a]];
    return g[0] * g[0] + g[1] * g[1];
}

}  // namespace

QuadraticForm assemble_weighted_stiffness(const Grid& grid, const Field& w, double eta) {
    if (!(eta > 0.0)) throw InvalidArgument("eta must be positive");
    if (!(w.grid() == grid)) throw InvalidArgument("weighted stiffness: weight lives on a different grid");
    const CellQuadrature rule(grid);
    const int dim = grid.dim();
    Triplets t;
    t.reserve(static_cast<size_t>(grid.cell_count()) * rule.locals * rule.locals);
    for (int e = 0; e < grid.cell_count(); ++e) {
        const auto nodes = grid.cell_nodes(e);
        std::array<std::array<double, 4>, 4> ke{};
        for (int q = 0; q < rule.points; ++q) {
            const double wq = interpolate(rule, q, nodes, w.values());
            const double coef = rule.weight[q] * (eta + wq * wq);
            for (int a = 0; a < rule.locals; ++a)
                for (int b = 0; b < rule.locals; ++b) ke[a][b] += coef * grad_dot(rule, q, a, b, dim);
        }
        // The form carries the factor 2 so that z^T A z / 2 equals the integral.
        for (int a = 0; a < rule.locals; ++a)
            for (int b = 0; b < rule.locals; ++b) t.emplace_back(nodes[a], nodes[b], 2.0 * ke[a][b]);
    }
    QuadraticForm form;
    form.A = from_triplets(grid.node_count(), t);
    form.b = Vector::Zero(grid.node_count());
    form.c = 0.0;
    return form;
}

QuadraticForm assemble_phase_form(const Grid& grid, const Field& u, double eps, double eta) {
    if (!(eps > 0.0)) throw InvalidArgument("eps must be positive");
    if (!(u.grid() == grid)) throw InvalidArgument("phase form: displacement lives on a different grid");
    const CellQuadrature rule(grid);
    const int dim = grid.dim();
    const int n = grid.node_count();
    Triplets t;
    t.reserve(static_cast<size_t>(grid.cell_count()) * rule.locals * rule.locals);
    Vector b = Vector::Zero(n);
    double c = 0.0;
    for (int e = 0; e < grid.cell_count(); ++e) {
        const auto nodes = grid.cell_nodes(e);
        std::array<std::array<double, 4>, 4> ke{};
        for (int q = 0; q < rule.points; ++q) {
            const double wq = rule.weight[q];
            const double gu2 = grad_sq(rule, q, nodes, u.values(), dim);
            c += wq * (eta * gu2 + 0.5 / eps);
            for (int a = 0; a < rule.locals; ++a) {
                b[nodes[a]] -= wq * rule.phi[q][a] / eps;
                for (int bb = 0; bb < rule.locals; ++bb) {
                    const double mass = rule.phi[q][a] * rule.phi[q][bb];
                    ke[a][bb] += wq * (2.0 * gu2 * mass + eps * grad_dot(rule, q, a, bb, dim) + mass / eps);
                }
            }
        }
        for (int a = 0; a < rule.locals; ++a)
            for (int bb = 0; bb < rule.locals; ++bb) t.emplace_back(nodes[a], nodes[bb], ke[a][bb]);
    }
    QuadraticForm form;
    form.A = from_triplets(n, t);
    form.b = std::move(b);
    form.c = c;
    return form;
}

SparseMatrix assemble_mass(const Grid& grid) {
    const CellQuadrature rule(grid);
    Triplets t;
    for (int e = 0; e < grid.cell_count(); ++e) {
        const auto nodes = grid.cell_nodes(e);
        for (int q = 0; q < rule.points; ++q)
            for (int a = 0; a < rule.locals; ++a)
                for (int b = 0; b < rule.locals; ++b)
                    t.emplace_back(nodes[a], nodes[b], rule.weight[q] * rule.phi[q][a] * rule.phi[q][b]);
    }
    return from_triplets(grid.node_count(), t);
}

void write_field(std::ostream& out, const Field& field) {
    const Grid& g = field.grid();
    out << std::setprecision(17);
    out << g.dim() << ' ' << g.nodes_x();
    if (g.dim() == 2) out << ' ' << g.nodes_y();
    out << ' ' << g.spacing(0);
    if (g.dim() == 2) out << ' ' << g.spacing(1);
    out << '\n';
    for (int n = 0; n < field.size(); ++n) out << field[n] << '\n';
}

Field read_field(std::istream& in, GridPtr grid) {
    int dim = 0;
    int nx = 0;
    int ny = 1;
    double hx = 0.0;
    double hy = 0.0;
    if (!(in >> dim)) throw InvalidArgument("snapshot: missing header");
    if (dim != grid->dim()) throw InvalidArgument("snapshot: dimension mismatch");
    in >> nx;
    if (dim == 2) in >> ny;
    in >> hx;
    if (dim == 2) in >> hy;
    if (!in || nx != grid->nodes_x() || ny != grid->nodes_y())
        throw InvalidArgument("snapshot: node counts do not match grid");
    auto close = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); };
    if (!close(hx, grid->spacing(0)) || (dim == 2 && !close(hy, grid->spacing(1))))
        throw InvalidArgument("snapshot: spacing does not match grid");
    Vector values(grid->node_count());
    for (int n = 0; n < grid->node_count(); ++n)
        if (!(in >> values[n])) throw InvalidArgument("snapshot: truncated value list");
    return Field(std::move(grid), std::move(values));
}

}  // namespace atfrac
