#pragma once

// Reference computations that share no code with the library: dense linear
// algebra, hand-written 1D element loops and brute-force searches.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// 1D P1 quantities on a uniform mesh of [0, L] with nodal values; the
// coefficient v is interpolated to the two Gauss points of each cell.
struct Bar {
    double length = 1.0;
    int cells = 10;
    double h() const { return length / cells; }

    template <class F>
    double cell_sum(F&& f) const {
        const double g = 0.5 / std::sqrt(3.0);
        double s = 0.0;
        for (int e = 0; e < cells; ++e)
            for (double xi : {0.5 - g, 0.5 + g}) s += 0.5 * h() * f(e, xi);
        return s;
    }

    double elliptic(const Vec& u, const Vec& v, double eta) const {
        return cell_sum([&](int e, double xi) {
            const double vq = (1 - xi) * v[e] + xi * v[e + 1];
            const double du = (u[e + 1] - u[e]) / h();
            return (eta + vq * vq) * du * du;
        });
    }

    double mm(const Vec& v, double eps) const {
        return cell_sum([&](int e, double xi) {
            const double vq = (1 - xi) * v[e] + xi * v[e + 1];
            const double dv = (v[e + 1] - v[e]) / h();
            return 0.5 * eps * dv * dv + (1 - vq) * (1 - vq) / (2 * eps);
        });
    }
};

// Minimizes x^T A x / 2 + b^T x over lower <= x <= upper by a primal
// active-set method with dense solves. A must be symmetric positive definite.
inline Vec active_set_qp(const Mat& A, const Vec& b, const Vec& lower, const Vec& upper) {
    const int n = static_cast<int>(b.size());
    enum State { Free, AtLower, AtUpper };
    std::vector<State> state(n, Free);
    Vec x = Vec::Zero(n);
    for (int i = 0; i < n; ++i) {
        x[i] = std::clamp(0.0, lower[i], upper[i]);
        if (lower[i] == upper[i]) state[i] = AtLower;
    }
    for (int iter = 0; iter < 50 * n + 100; ++iter) {
        std::vector<int> free;
        for (int i = 0; i < n; ++i)
            if (state[i] == Free) free.push_back(i);
        // Equality-constrained minimizer on the free set.
        Vec target = x;
        if (!free.empty()) {
            const int m = static_cast<int>(free.size());
            Mat Aff(m, m);
            Vec rhs(m);
            for (int r = 0; r < m; ++r) {
                rhs[r] = -b[free[r]];
                for (int k = 0; k < n; ++k)
                    if (state[k] != Free) rhs[r] -= A(free[r], k) * x[k];
                for (int c = 0; c < m; ++c) Aff(r, c) = A(free[r], free[c]);
            }
            const Vec xf = Aff.llt().solve(rhs);
            for (int r = 0; r < m; ++r) target[free[r]] = xf[r];
        }
        // Longest feasible step towards the target.
        double step = 1.0;
        int block = -1;
        State block_state = Free;
        for (int i : free) {
            const double d = target[i] - x[i];
            if (d < 0 && x[i] + d < lower[i]) {
                const double s = (lower[i] - x[i]) / d;
                if (s < step) { step = s; block = i; block_state = AtLower; }
            } else if (d > 0 && x[i] + d > upper[i]) {
                const double s = (upper[i] - x[i]) / d;
                if (s < step) { step = s; block = i; block_state = AtUpper; }
            }
        }
        x += step * (target - x);
        if (block >= 0) {
            x[block] = block_state == AtLower ? lower[block] : upper[block];
            state[block] = block_state;
            continue;
        }
        // Multiplier check on the active bounds.
        const Vec grad = A * x + b;
        int worst = -1;
        double worst_val = 0.0;
        for (int i = 0; i < n; ++i) {
            if (lower[i] == upper[i]) continue;
            const double viol = state[i] == AtLower ? -grad[i] : state[i] == AtUpper ? grad[i] : 0.0;
            if (viol > worst_val) { worst_val = viol; worst = i; }
        }
        if (worst < 0 || worst_val <= 1e-14 * (1.0 + grad.lpNorm<Eigen::Infinity>())) return x;
        state[worst] = Free;
    }
    return x;
}

// Exhaustive search over all 3^n assignments (lower / upper / free) for
// n <= 10: returns the feasible KKT point of least energy.
inline Vec enumerate_qp(const Mat& A, const Vec& b, const Vec& lower, const Vec& upper) {
    const int n = static_cast<int>(b.size());
    Vec best;
    double best_energy = std::numeric_limits<double>::infinity();
    int total = 1;
    for (int i = 0; i < n; ++i) total *= 3;
    for (int code = 0; code < total; ++code) {
        std::vector<int> kind(n);
        for (int i = 0, c = code; i < n; ++i, c /= 3) kind[i] = c % 3;
        Vec x = Vec::Zero(n);
        std::vector<int> free;
        for (int i = 0; i < n; ++i) {
            if (kind[i] == 0) x[i] = lower[i];
            else if (kind[i] == 1) x[i] = upper[i];
            else free.push_back(i);
        }
        const int m = static_cast<int>(free.size());
        if (m > 0) {
            Mat Aff(m, m);
            Vec rhs(m);
            for (int r = 0; r < m; ++r) {
                rhs[r] = -b[free[r]];
                for (int k = 0; k < n; ++k)
                    if (kind[k] != 2) rhs[r] -= A(free[r], k) * x[k];
                for (int c = 0; c < m; ++c) Aff(r, c) = A(free[r], free[c]);
            }
            const Vec xf = Aff.llt().solve(rhs);
            for (int r = 0; r < m; ++r) x[free[r]] = xf[r];
        }
        bool feasible = true;
        for (int i = 0; i < n; ++i)
            if (x[i] < lower[i] - 1e-12 || x[i] > upper[i] + 1e-12) feasible = false;
        if (!feasible) continue;
        const double e = 0.5 * x.dot(A * x) + b.dot(x);
        if (e < best_energy) {
            best_energy = e;
            best = x;
        }
    }
    return best;
}

// Random symmetric positive definite matrix with eigenvalues in [lo, hi].
inline Mat random_spd(int n, std::mt19937& rng, double lo = 0.1, double hi = 10.0) {
    std::normal_distribution<double> normal;
    Mat M(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) M(i, j) = normal(rng);
    const Eigen::HouseholderQR<Mat> qr(M);
    const Mat Q = qr.householderQ();
    std::uniform_real_distribution<double> eig(lo, hi);
    Vec d(n);
    for (int i = 0; i < n; ++i) d[i] = eig(rng);
    Mat A = Q * d.asDiagonal() * Q.transpose();
    return 0.5 * (A + A.transpose());
}

// Homogeneous state of a bar under uniform strain s: min over a scalar v in
// [0, 1] of (eta + v^2) s^2 + (1 - v)^2 / (2 eps), by dense scan plus
// golden-section refinement.
struct Homogeneous {
    double v = 1.0;
    double energy = 0.0;
};

inline Homogeneous homogeneous_scan(double strain, double eps, double eta) {
    auto f = [&](double v) { return (eta + v * v) * strain * strain + (1 - v) * (1 - v) / (2 * eps); };
    Homogeneous best{0.0, f(0.0)};
    const int samples = 20000;
    for (int k = 0; k <= samples; ++k) {
        const double v = static_cast<double>(k) / samples;
        if (f(v) < best.energy) best = {v, f(v)};
    }
    double a = std::max(0.0, best.v - 1.0 / samples);
    double c = std::min(1.0, best.v + 1.0 / samples);
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int k = 0; k < 100; ++k) {
        const double x1 = c - phi * (c - a);
        const double x2 = a + phi * (c - a);
        if (f(x1) < f(x2)) c = x2;
        else a = x1;
    }
    const double v = 0.5 * (a + c);
    return {v, f(v)};
}

// Series resistance of a 1D bar with P1 elements and Gauss-point coefficient:
// the u-minimizing elliptic energy for a unit jump is 1 / sum_e (h / k_e),
// k_e being the cell-averaged coefficient over its two Gauss points.
inline double series_energy(const Vec& v, double length, double eta) {
    const int cells = static_cast<int>(v.size()) - 1;
    const double h = length / cells;
    const double g = 0.5 / std::sqrt(3.0);
    double resistance = 0.0;
    for (int e = 0; e < cells; ++e) {
        double k = 0.0;
        for (double xi : {0.5 - g, 0.5 + g}) {
            const double vq = (1 - xi) * v[e] + xi * v[e + 1];
            k += 0.5 * (eta + vq * vq);
        }
        resistance += h / k;
    }
    return 1.0 / resistance;
}

}  // namespace oracle
