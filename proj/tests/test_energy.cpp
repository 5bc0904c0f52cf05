#include <doctest.h>

#include <random>

#include "atfrac/energy.hpp"
#include "oracles.hpp"

#include "support.hpp"

using namespace atfrac;

namespace {

GridPtr bar(int cells) { return build_grid(1, {1.0, 0.0}, {cells, 0}, {Face::Left, Face::Right}); }

Field random_field(const GridPtr& g, std::mt19937& rng, double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    Vector x(g->node_count());
    for (auto& xi : x) xi = d(rng);
    return Field(g, x);
}

}  // namespace

TEST_SUITE("energy") {

TEST_CASE("elliptic energy on simple states") {
    const auto g = bar(20);
    const Field x = Field::from_function(g, [](double x, double) { return x; });
    CHECK(elliptic_energy(Field::constant(g, 0.0), Field::constant(g, 0.3), 0.01) == 0.0);
    CHECK(near(elliptic_energy(x, Field::constant(g, 1.0), 0.01), 1.01, 1e-12));
    CHECK(near(elliptic_energy(x, Field::constant(g, 0.5), 0.01), 0.26, 1e-12));
    CHECK_THROWS_AS(elliptic_energy(x, Field::constant(bar(10), 1.0), 0.01), InvalidArgument);
}

TEST_CASE("Modica-Mortola energy on simple states") {
    const auto g = bar(20);
    CHECK(mm_energy(Field::constant(g, 1.0), 0.05) == 0.0);
    CHECK(near(mm_energy(Field::constant(g, 0.0), 0.05), 10.0, 1e-12));
}

TEST_CASE("exponential profile carries unit surface energy") {
    for (double eps : {0.02, 0.01}) {
        const int cells = static_cast<int>(std::round(5.0 / eps));
        const auto g = bar(cells);
        const Field v = Field::from_function(g, [&](double x, double) { return 1.0 - std::exp(-std::abs(x - 0.5) / eps); });
        const double direct = oracle::Bar{1.0, cells}.mm(v.values(), eps);
        CHECK(near(mm_energy(v, eps), direct, 1e-12));
        CHECK(std::abs(mm_energy(v, eps) - 1.0) <= 0.05);
    }
}

TEST_CASE("energies agree with the hand-written element loop") {
    std::mt19937 rng(11);
    const auto g = bar(17);
    const oracle::Bar ref{1.0, 17};
    for (int trial = 0; trial < 20; ++trial) {
        const Field u = random_field(g, rng, -1.0, 1.0);
        const Field v = random_field(g, rng, 0.0, 1.0);
        ATParams p;
        p.eps = 0.07;
        p.eta = 1e-3;
        CHECK(near(elliptic_energy(u, v, p.eta), ref.elliptic(u.values(), v.values(), p.eta), 1e-12));
        CHECK(near(mm_energy(v, p.eps), ref.mm(v.values(), p.eps), 1e-12));
        const double total = total_energy(u, v, p);
        CHECK(std::abs(total - elliptic_energy(u, v, p.eta) - mm_energy(v, p.eps)) <= 1e-12 * total);
    }
}

TEST_CASE("work increment") {
    const auto g = bar(10);
    const double t = 0.7, delta = 0.05, eta = 0.01;
    const Field u = Field::from_function(g, [&](double x, double) { return t * x; });
    const Field g0 = Field::from_function(g, [&](double x, double) { return t * x; });
    const Field g1 = Field::from_function(g, [&](double x, double) { return (t + delta) * x; });
    const Field one = Field::constant(g, 1.0);
    CHECK(near(work_increment(u, one, g0, g1, eta), 2 * 1.01 * t * delta, 1e-12));
    CHECK(work_increment(u, one, g0, g0, eta) == 0.0);
    CHECK(std::abs(work_increment(Field::constant(g, 3.0), one, g0, g1, eta)) <= 1e-14);
}

TEST_CASE("surface energy dominates the coarea integral") {
    std::mt19937 rng(3);
    for (int dim : {1, 2}) {
        const auto g = dim == 1 ? bar(30) : build_grid(2, {1.0, 1.0}, {8, 8}, {Face::Bottom});
        for (int trial = 0; trial < 50; ++trial) {
            const Field v = random_field(g, rng, 0.0, 1.0);
            for (double eps : {0.01, 0.1, 1.0}) CHECK(mm_energy(v, eps) >= coarea_integral(v) - 1e-10);
        }
    }
}

TEST_CASE("truncation never raises the energy") {
    std::mt19937 rng(5);
    for (int dim : {1, 2}) {
        const auto g = dim == 1 ? bar(25) : build_grid(2, {1.0, 1.0}, {6, 7}, {Face::Left});
        ATParams p;
        for (int trial = 0; trial < 50; ++trial) {
            const Field u = random_field(g, rng, -2.0, 2.0);
            const Field v = random_field(g, rng, 0.0, 1.0);
            for (double level : {0.1, 0.5, 1.0, 1.9}) {
                const Field c = truncate(u, level);
                CHECK(c.values().lpNorm<Eigen::Infinity>() <= level);
                CHECK(total_energy(c, v, p) <= total_energy(u, v, p) + 1e-12);
            }
        }
    }
}

TEST_CASE("energy derivatives match the assembled forms") {
    std::mt19937 rng(19);
    for (int dim : {1, 2}) {
        const auto g = dim == 1 ? bar(15) : build_grid(2, {1.0, 1.0}, {5, 5}, {Face::Bottom, Face::Top});
        ATParams p;
        p.eps = 0.1;
        p.eta = 1e-3;
        for (int trial = 0; trial < 10; ++trial) {
            const Field u = random_field(g, rng, -1.0, 1.0);
            const Field v = random_field(g, rng, 0.05, 0.95);
            const Field d = random_field(g, rng, -1.0, 1.0);
            const double step = 1e-4;
            const Vector gu = assemble_weighted_stiffness(*g, v, p.eta).gradient(u.values());
            const double fd_u = (total_energy(Field(g, u.values() + step * d.values()), v, p) -
                                 total_energy(Field(g, u.values() - step * d.values()), v, p)) / (2 * step);
            CHECK(near(fd_u, gu.dot(d.values()), 1e-6));
            const Vector gv = assemble_phase_form(*g, u, p.eps, p.eta).gradient(v.values());
            const double fd_v = (total_energy(u, Field(g, v.values() + step * d.values()), p) -
                                 total_energy(u, Field(g, v.values() - step * d.values()), p)) / (2 * step);
            CHECK(near(fd_v, gv.dot(d.values()), 1e-6));
            CHECK(near(assemble_phase_form(*g, u, p.eps, p.eta).evaluate(v.values()),
               total_energy(u, v, p), 1e-12));
        }
    }
}

TEST_CASE("parameter validation") {
    const ATParams p = ATParams::with_defaults(0.05, 2.0);
    CHECK(p.eta == doctest::Approx(2.5e-4));
    CHECK(p.delta == doctest::Approx(0.025));
    CHECK(p.tol_am == doctest::Approx(2e-8));
    CHECK_NOTHROW(p.validate(1.0));
    CHECK_THROWS_AS(p.validate(0.04), InvalidArgument);
    ATParams bad = p;
    bad.eta = 0.06;
    CHECK_THROWS_AS(bad.validate(1.0), InvalidArgument);
    bad = p;
    bad.tol_qp = 0.0;
    CHECK_THROWS_AS(bad.validate(1.0), InvalidArgument);
}

}  // TEST_SUITE
