#pragma once

#include <limits>
#include <stdexcept>
#include <string>

#include "atfrac/energy.hpp"
#include "atfrac/grid.hpp"

namespace atfrac {

/// A solver hit its iteration cap; the message carries the diagnostics.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct LinearSolve {
    Field solution;
    int iterations = 0;
    double relative_residual = 0.0;
};

/**
 * Minimizes a symmetric positive definite form with the Dirichlet nodes of the
 * grid pinned to the values of `dirichlet`. Dirichlet rows and columns are
 * eliminated and the reduced system is solved by Jacobi-preconditioned
 * conjugate gradients, capped at 10 * (free node count) iterations.
 */
LinearSolve solve_spd(const QuadraticForm& form, const Field& dirichlet, double tol_lin,
                      const Field* start = nullptr);

/// Relative residual |A_ff x_f + A_fd x_d + b_f| / |A_fd x_d + b_f| over the free nodes.
double spd_residual(const QuadraticForm& form, const Field& x);

struct BoxQp {
    Vector x;
    int iterations = 0;
    double kkt = 0.0;  ///< sup-norm of the projected gradient at x
};

/**
 * Minimizes a convex quadratic form over lower <= x <= upper by projected
 * gradients with Barzilai-Borwein steps. Each step is an exact line search on
 * the segment towards the projected point, so the objective never increases.
 * Nodes with lower == upper are fixed.
 */
BoxQp solve_box_qp(const QuadraticForm& form, const Vector& lower, const Vector& upper, double tol_qp,
                   const Vector* start = nullptr, int max_iterations = 0);

Field solve_box_qp(const QuadraticForm& form, const Field& lower, const Field& upper, double tol_qp,
                   const Field* start = nullptr);

/// Sup-norm of the projected gradient of `form` at x for the box [lower, upper].
double projected_gradient_norm(const QuadraticForm& form, const Vector& x, const Vector& lower,
                               const Vector& upper);

struct AMResult {
    Field u;
    Field v;
    EnergyRecord record;  ///< elliptic / surface / total of the returned pair
    int sweeps = 0;
    double u_residual = 0.0;  ///< displacement solve residual at the returned pair
    double v_kkt = 0.0;       ///< projected gradient of the phase problem at the returned pair
};

/**
 * Alternating minimization of the functional over u (with u = g on the
 * Dirichlet nodes) and v (0 <= v <= v_upper, v = 1 on the Dirichlet nodes).
 * Each half-step is kept only when it does not raise the energy, so the
 * returned energy never exceeds the energy of (u0, v0). After each
 * displacement solve u is clipped to [-truncation, truncation].
 *
 * Throws SolverError when the sweep cap is hit.
 */
AMResult alternate_minimize(const Field& u0, const Field& v0, const Field& v_upper, const Field& g,
                            const ATParams& params,
                            double truncation = std::numeric_limits<double>::infinity());

}  // namespace atfrac
