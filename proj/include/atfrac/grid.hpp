#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace atfrac {

using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Thrown for malformed inputs: degenerate grids, mismatched fields, bad configs.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Boundary faces of the structured domain. Bottom/Top exist only in 2D.
enum class Face { Left, Right, Bottom, Top };

Face parse_face(const std::string& name);
std::string face_name(Face face);

/**
 * Structured 1D segment [0, Lx] or 2D rectangle [0, Lx] x [0, Ly].
 *
 * Nodes are numbered row-major with x running fastest:
 * node(i, j) = j * (cells_x + 1) + i. Cells (elements) use the same
 * ordering over cell indices.
 */
class Grid {
public:
    Grid(int dim, std::array<double, 2> extents, std::array<int, 2> cells,
         const std::vector<Face>& dirichlet_faces);

    int dim() const { return dim_; }
    double extent(int axis) const { return extents_[axis]; }
    int cells(int axis) const { return cells_[axis]; }
    double spacing(int axis) const { return spacing_[axis]; }
    const std::vector<Face>& dirichlet_faces() const { return faces_; }

    int nodes_x() const { return cells_[0] + 1; }
    int nodes_y() const { return dim_ == 2 ? cells_[1] + 1 : 1; }
    int node_count() const { return nodes_x() * nodes_y(); }
    int cell_count() const { return dim_ == 2 ? cells_[0] * cells_[1] : cells_[0]; }

    int node(int i, int j = 0) const { return j * nodes_x() + i; }
    int node_i(int n) const { return n % nodes_x(); }
    int node_j(int n) const { return n / nodes_x(); }
    double x(int n) const { return node_i(n) * spacing_[0]; }
    double y(int n) const { return dim_ == 2 ? node_j(n) * spacing_[1] : 0.0; }

    /// Lebesgue measure of the domain.
    double measure() const { return dim_ == 2 ? extents_[0] * extents_[1] : extents_[0]; }

    bool is_dirichlet(int n) const { return dirichlet_[n] != 0; }
    const std::vector<char>& dirichlet_mask() const { return dirichlet_; }
    int dirichlet_count() const;

    /// Local-to-global node map of a cell; 2 entries in 1D, 4 in 2D ordered (00, 10, 01, 11).
    std::array<int, 4> cell_nodes(int cell) const;
    int nodes_per_cell() const { return dim_ == 2 ? 4 : 2; }

    bool operator==(const Grid& other) const;

private:
    int dim_;
    std::array<double, 2> extents_;
    std::array<int, 2> cells_;
    std::array<double, 2> spacing_;
    std::vector<Face> faces_;
    std::vector<char> dirichlet_;
};

using GridPtr = std::shared_ptr<const Grid>;

GridPtr build_grid(int dim, std::array<double, 2> extents, std::array<int, 2> cells,
                   const std::vector<Face>& dirichlet_faces);

/**
 * Tensor 2-point Gauss rule on the reference cell, with shape values and
 * physical gradients pre-multiplied for one (uniform) cell size.
 */
struct CellQuadrature {
    int points = 0;
    int locals = 0;
    std::array<double, 4> weight{};                         // includes the cell Jacobian
    std::array<std::array<double, 4>, 4> phi{};             // phi[q][a]
    std::array<std::array<std::array<double, 2>, 4>, 4> grad{};  // grad[q][a][d]

    explicit CellQuadrature(const Grid& grid);
};

/// Nodal scalar field on a grid.
class Field {
public:
    Field(GridPtr grid, Vector values);

    static Field constant(GridPtr grid, double value);
    static Field from_function(GridPtr grid, const std::function<double(double, double)>& f);

    const Grid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    const Vector& values() const { return values_; }
    Vector& values() { return values_; }
    double operator[](int n) const { return values_[n]; }
    double& operator[](int n) { return values_[n]; }
    int size() const { return static_cast<int>(values_.size()); }

private:
    GridPtr grid_;
    Vector values_;
};

bool same_grid(const Field& a, const Field& b);
void require_same_grid(const Field& a, const Field& b, const char* what);

/// Throws unless 0 <= v <= 1 at every node.
void validate_phase_field(const Field& v);

/// z -> z^T A z / 2 + b^T z + c over nodal vectors.
struct QuadraticForm {
    SparseMatrix A;
    Vector b;
    double c = 0.0;

    double evaluate(const Vector& z) const;
    Vector gradient(const Vector& z) const;
};

/// u -> integral of (eta + w^2) |grad u|^2.
QuadraticForm assemble_weighted_stiffness(const Grid& grid, const Field& w, double eta);

/**
 * v -> integral of v^2 |grad u|^2 + (eps/2)|grad v|^2 + (1/2eps)(1 - v)^2,
 * plus eta * integral |grad u|^2 in the constant so that the form equals the
 * full functional at fixed u.
 */
QuadraticForm assemble_phase_form(const Grid& grid, const Field& u, double eps, double eta);

/// Consistent mass matrix (integral of phi_a phi_b).
SparseMatrix assemble_mass(const Grid& grid);

/// Plain-text snapshot: header `dim nx [ny] hx [hy]` (node counts), then one value per line.
void write_field(std::ostream& out, const Field& field);
Field read_field(std::istream& in, GridPtr grid);

}  // namespace atfrac
