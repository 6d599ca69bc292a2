#include "doctest.h"

#include "nlch/grid.hpp"
#include "helpers.hpp"

#include <cmath>
#include <numbers>

using namespace nlch;
using testing::uniform;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("cheb_grid node placement") {
    const Grid1D g3 = cheb_grid(3, 0.0, 1.0);
    CHECK(g3.points(0) == 0.0);
    CHECK(g3.points(1) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(g3.points(2) == 1.0);

    const Grid1D g2 = cheb_grid(2, 0.0, 1.0);
    CHECK(g2.points(0) == 0.0);
    CHECK(g2.points(1) == 1.0);
    CHECK(g2.diff(0, 0) == doctest::Approx(-1.0));
    CHECK(g2.diff(0, 1) == doctest::Approx(1.0));
    CHECK(g2.diff(1, 0) == doctest::Approx(-1.0));
    CHECK(g2.diff(1, 1) == doctest::Approx(1.0));

    // Minimal spacing of the 20-point grid from the node formula, evaluated
    // in extended precision.
    const Grid1D g20 = cheb_grid(20, 0.0, 1.0);
    const long double expected = (1.0L - std::cos(std::numbers::pi_v<long double> / 19.0L)) / 2.0L;
    CHECK(std::abs(g20.points(1) - g20.points(0) - static_cast<double>(expected)) < 1e-15);
    CHECK(static_cast<double>(expected) == doctest::Approx(6.8193e-3).epsilon(1e-3));

    CHECK_THROWS_AS(cheb_grid(1, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(cheb_grid(5, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("cheb_grid quadrature and differentiation invariants") {
    for (int n : {2, 5, 10, 24, 40}) {
        for (auto [a, b] : {std::pair{0.0, 1.0}, std::pair{-1.0, 2.5}}) {
            const Grid1D g = cheb_grid(n, a, b);
            CHECK(std::abs(g.weights.sum() - (b - a)) < 1e-14 * (b - a));
            for (int j = 1; j < n; ++j)
                CHECK(g.points(j) > g.points(j - 1));
            // diff annihilates constants
            CHECK((g.diff * Eigen::VectorXd::Ones(n)).cwiseAbs().maxCoeff() < 1e-12);
        }
    }

    // Monomial differentiation, exact up to degree n-1.
    for (int n : {10, 24, 40}) {
        const Grid1D g = cheb_grid(n, 0.0, 1.0);
        for (int deg = 1; deg <= n - 3; deg += 3) {
            Eigen::VectorXd f(n), df(n);
            for (int i = 0; i < n; ++i) {
                f(i) = std::pow(g.points(i), deg);
                df(i) = deg * std::pow(g.points(i), deg - 1);
            }
            const double scale = df.cwiseAbs().maxCoeff();
            CHECK((g.diff * f - df).cwiseAbs().maxCoeff() / scale < 1e-10);
        }
    }

    // Clenshaw-Curtis exactness for degree <= n-1.
    for (int n : {4, 9, 16}) {
        const Grid1D g = cheb_grid(n, 0.0, 1.0);
        for (int deg = 0; deg <= n - 1; ++deg) {
            double q = 0.0;
            for (int i = 0; i < n; ++i)
                q += g.weights(i) * std::pow(g.points(i), deg);
            CHECK(std::abs(q - 1.0 / (deg + 1)) < 1e-12);
        }
    }
}

TEST_CASE("tensor_grid structure") {
    const Grid2D g = tensor_grid(cheb_grid(3, 0.0, 1.0), cheb_grid(3, 0.0, 1.0));
    CHECK(g.m() == 9);
    CHECK(g.points(4, 0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(g.points(4, 1) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(std::abs(g.weights.sum() - 1.0) < 1e-13);

    auto grid = testing::square_grid(10);
    // Lap equals Dx Dx + Dy Dy by assembly; check elementwise anyway.
    CHECK((grid->lap - (grid->dx * grid->dx + grid->dy * grid->dy)).cwiseAbs().maxCoeff() == 0.0);

    // Lap of x^2 + y^2 is 4 at interior points.
    Eigen::VectorXd f(grid->m());
    for (int i = 0; i < grid->m(); ++i)
        f(i) = grid->points(i, 0) * grid->points(i, 0) + grid->points(i, 1) * grid->points(i, 1);
    const Eigen::VectorXd lf = grid->lap * f;
    std::vector<bool> bnd(grid->m(), false);
    for (const auto& bp : grid->boundary)
        bnd[bp.index] = true;
    for (int i = 0; i < grid->m(); ++i)
        if (!bnd[i])
            CHECK(lf(i) == doctest::Approx(4.0).epsilon(1e-9));

    CHECK(static_cast<int>(grid->boundary.size()) == 2 * 10 + 2 * 10 - 4);
}

TEST_CASE("barycentric interpolation") {
    auto grid = testing::square_grid(10);

    // Identity on the source points.
    std::vector<Point2> pts;
    for (int i = 0; i < grid->m(); ++i)
        pts.push_back(grid->points.row(i));
    const InterpMatrix id = barycentric_interp(*grid, pts);
    CHECK((id.entries - Eigen::MatrixXd::Identity(grid->m(), grid->m())).cwiseAbs().maxCoeff()
          < 1e-13);

    // Polynomial reproduction: x^3 y^2 at (0.3, 0.7).
    Eigen::VectorXd f(grid->m());
    for (int i = 0; i < grid->m(); ++i)
        f(i) = std::pow(grid->points(i, 0), 3) * std::pow(grid->points(i, 1), 2);
    const Point2 target{0.3, 0.7};
    const InterpMatrix im = barycentric_interp(*grid, std::span(&target, 1));
    CHECK(std::abs((im.entries * f)(0) - 0.013230) < 1e-10);
    CHECK(std::abs(im.entries.row(0).sum() - 1.0) < 1e-12);

    // Smooth reproduction on a 30x30 grid at random interior targets.
    auto g30 = testing::square_grid(30);
    Eigen::VectorXd s(g30->m());
    for (int i = 0; i < g30->m(); ++i)
        s(i) = std::sin(2 * pi * g30->points(i, 0)) * std::cos(2 * pi * g30->points(i, 1));
    for (int rep = 0; rep < 10; ++rep) {
        const Point2 t{uniform(0.05, 0.95), uniform(0.05, 0.95)};
        const InterpMatrix m = barycentric_interp(*g30, std::span(&t, 1));
        const double direct = std::sin(2 * pi * t.x()) * std::cos(2 * pi * t.y());
        CHECK(std::abs((m.entries * s)(0) - direct) < 1e-9);
        CHECK(std::abs(m.entries.row(0).sum() - 1.0) < 1e-12);
    }

    const Point2 bad{std::nan(""), 0.5};
    CHECK_THROWS_AS(barycentric_interp(*grid, std::span(&bad, 1)), std::invalid_argument);
}

TEST_CASE("spectral convergence of interpolation for exp(x+y)") {
    std::vector<Point2> targets;
    for (int i = 0; i < 100; ++i)
        targets.push_back({uniform(0.0, 1.0), uniform(0.0, 1.0)});

    double prev = 0.0;
    for (int n : {6, 10, 14, 18}) {
        auto g = testing::square_grid(n);
        Eigen::VectorXd f(g->m());
        for (int i = 0; i < g->m(); ++i)
            f(i) = std::exp(g->points(i, 0) + g->points(i, 1));
        const InterpMatrix im = barycentric_interp(*g, targets);
        const Eigen::VectorXd approx = im.entries * f;
        double err = 0.0;
        for (std::size_t k = 0; k < targets.size(); ++k)
            err = std::max(err, std::abs(approx(k) - std::exp(targets[k].x() + targets[k].y())));
        if (prev > 1e-13)
            CHECK(err < 0.5 * prev);  // at least geometric decay, down to roundoff
        prev = err;
    }
    CHECK(prev < 1e-10);
}

TEST_CASE("differentiation-quadrature duality") {
    auto g = testing::square_grid(20);
    Eigen::VectorXd f(g->m());
    for (int i = 0; i < g->m(); ++i)
        f(i) = std::exp(g->points(i, 0) + 0.5 * g->points(i, 1));
    // Integral of df/dx over the square equals the line integral over the
    // vertical boundary edges.
    const double lhs = g->weights.dot(g->dx * f);
    double rhs = 0.0;
    for (int iy = 0; iy < g->ny(); ++iy) {
        const double wy = g->gy.weights(iy);
        rhs += wy * (f(g->flat(g->nx() - 1, iy)) - f(g->flat(0, iy)));
    }
    CHECK(std::abs(lhs - rhs) < 1e-8);
}
