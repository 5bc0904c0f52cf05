#pragma once

#include "atfrac/grid.hpp"

namespace atfrac {

/// Knobs of the regularized functional and of the discrete scheme.
struct ATParams {
    double eps = 0.05;       ///< regularization length
    double eta = 2.5e-4;     ///< residual stiffness, default eps^2 / 10
    double delta = 0.025;    ///< time step
    double tol_am = 1e-8;    ///< absolute energy decrease per sweep that stops alternating minimization
    double tol_lin = 1e-10;  ///< relative residual of the displacement solve
    double tol_qp = 1e-10;   ///< sup-norm of the projected gradient in the phase solve
    int max_sweeps = 200;

    static ATParams with_defaults(double eps, double domain_measure = 1.0);

    /// Throws InvalidArgument unless 0 < eta < eps < min_extent and all tolerances are positive.
    void validate(double min_extent) const;
};

struct EnergyRecord {
    int step = 0;
    double t = 0.0;
    double elliptic = 0.0;
    double surface = 0.0;
    double total = 0.0;
    double work_increment = 0.0;
    double work_cumulative = 0.0;
    double upper_bound = 0.0;
    double lower_bound = 0.0;
    int am_sweeps = 0;
    bool competitor_accepted = false;
    bool upper_violated = false;
    bool lower_violated = false;
};

double elliptic_energy(const Field& u, const Field& v, double eta);
double mm_energy(const Field& v, double eps);
double total_energy(const Field& u, const Field& v, const ATParams& params);

/// 2 * integral (eta + v^2) grad u . grad (g_next - g_prev).
double work_increment(const Field& u, const Field& v, const Field& g_prev, const Field& g_next,
                      double eta);

/// integral (eta + v^2) |grad w|^2 for an increment w; the quadratic remainder of a warm start.
double weighted_dirichlet(const Field& w, const Field& v, double eta);

/// L2 norm of the gradient of a nodal field.
double gradient_norm(const Field& f);

/// integral (1 - v)|grad v| under the same quadrature as mm_energy.
double coarea_integral(const Field& v);

/// Nodal clip of u to [-level, level].
Field truncate(const Field& u, double level);

}  // namespace atfrac
