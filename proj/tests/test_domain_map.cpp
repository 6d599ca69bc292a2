#include "doctest.h"

#include "nlch/domain_map.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace nlch;
using testing::square_grid;
using testing::uniform;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("rectangle map geometry") {
    const DomainMap m = DomainMap::rectangle(0.0, 2.0, -1.0, 3.0);
    const Point2 p = m.forward({0.5, 0.25});
    CHECK(p.x() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(p.y() == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(m.jac_det({0.3, 0.9}) == doctest::Approx(8.0).epsilon(1e-15));
    CHECK_THROWS_AS(DomainMap::rectangle(1.0, 0.0, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("bulged map bounds and injectivity") {
    CHECK_THROWS_AS(DomainMap::bulged(0.5), std::invalid_argument);
    CHECK_THROWS_AS(DomainMap::bulged(-0.6), std::invalid_argument);

    const DomainMap m = DomainMap::bulged(0.3);
    double jmin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 50; ++i)
        for (int j = 0; j < 50; ++j)
            jmin = std::min(jmin, m.jac_det({i / 49.0, j / 49.0}));
    CHECK(jmin >= 4.0 * (1.0 - 4.0 * 0.3 * 0.3));  // = 2.56

    // Injectivity on a sample: mapped points coincide only with equal
    // preimages.
    std::vector<std::pair<Point2, Point2>> pts;
    for (int k = 0; k < 10000; ++k) {
        const Point2 x{uniform(0.0, 1.0), uniform(0.0, 1.0)};
        pts.push_back({x, m.forward(x)});
    }
    std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
        return a.second.x() < b.second.x();
    });
    for (std::size_t i = 1; i < pts.size(); ++i) {
        const auto& [xa, ya] = pts[i - 1];
        const auto& [xb, yb] = pts[i];
        if ((ya - yb).norm() < 1e-12)
            CHECK((xa - xb).norm() < 1e-10);
    }
}

TEST_CASE("identity rectangle pullback is bitwise the square operator") {
    auto grid = square_grid(8);
    const DomainMap id = DomainMap::rectangle(0.0, 1.0, 0.0, 1.0);
    const ConvOperator a = pullback_operator(id, grid, Kernel::newtonian2d(), 0.05, 2.0);
    const ConvOperator b = assemble_operator(grid, Kernel::newtonian2d(), 0.05, 2.0,
                                             Partition::Mode::maximal, true);
    CHECK((a.matrix - b.matrix).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("rectangle pullback matches the mapped-domain quadrature oracle") {
    auto grid = square_grid(10);
    const DomainMap m = DomainMap::rectangle(0.0, 2.0, 0.0, 2.0);
    const ConvOperator op = pullback_operator(m, grid, Kernel::newtonian2d(), 1e-2, 4.0);
    const Eigen::VectorXd conv = op.matrix * Eigen::VectorXd::Ones(grid->m());
    // K * 1 over [0,2]^2 at the mapped collocation point: four quadrant
    // rectangles with the polar-analytic oracle.
    int checked = 0;
    for (int i = 0; i < grid->m() && checked < 20; i += 5, ++checked) {
        const Point2 z = m.forward(grid->points.row(i));
        const double oracle = oracles::log_rect(z.x(), z.y()) + oracles::log_rect(2.0 - z.x(), z.y())
                            + oracles::log_rect(z.x(), 2.0 - z.y())
                            + oracles::log_rect(2.0 - z.x(), 2.0 - z.y());
        CHECK(std::abs(conv(i) - oracle) < 1e-7);
    }
}

TEST_CASE("rectangle pullback commutes with kernel scaling") {
    auto grid = square_grid(6);
    const DomainMap m = DomainMap::rectangle(0.0, 1.5, 0.5, 2.0);
    const ConvOperator unit = pullback_operator(m, grid, Kernel::newtonian2d(1.0), 0.03, 2.0);
    const ConvOperator sc = pullback_operator(m, grid, Kernel::newtonian2d(-7.5), 0.03, 2.0);
    const double scale = (sc.matrix - (-7.5) * unit.matrix).cwiseAbs().maxCoeff();
    CHECK(scale < 1e-14 * unit.matrix.cwiseAbs().maxCoeff() * 7.5);
}

TEST_CASE("area identity through the jacobian") {
    auto grid = square_grid(12);
    const DomainMap r = DomainMap::rectangle(0.0, 2.0, -1.0, 0.5);
    Eigen::VectorXd jr(grid->m());
    for (int i = 0; i < grid->m(); ++i)
        jr(i) = r.jac_det(grid->points.row(i));
    CHECK(std::abs(grid->weights.dot(jr) - 3.0) < 1e-9);

    const DomainMap b = DomainMap::bulged(0.2);
    Eigen::VectorXd jb(grid->m());
    for (int i = 0; i < grid->m(); ++i)
        jb(i) = b.jac_det(grid->points.row(i));
    // Fine-mesh reference area.
    auto fine = square_grid(48);
    Eigen::VectorXd jf(fine->m());
    for (int i = 0; i < fine->m(); ++i)
        jf(i) = b.jac_det(fine->points.row(i));
    CHECK(std::abs(grid->weights.dot(jb) - fine->weights.dot(jf)) < 1e-9);
}

TEST_CASE("bulged pullback matches a polar quadrature oracle") {
    auto grid = square_grid(8);
    const DomainMap m = DomainMap::bulged(0.25);
    const ConvOperator op = pullback_operator(m, grid, Kernel::newtonian2d(), 1e-2, 4.0);
    const Eigen::VectorXd conv = op.matrix * Eigen::VectorXd::Ones(grid->m());

    // Oracle: integral over the reference square of K(Psi(x)-Psi(y))|J(y)|,
    // polar about x with adaptive radius; the radial log singularity is
    // integrable and resolved by the adaptive rule.
    auto oracle_at = [&](const Point2& x) {
        const Point2 px = m.forward(x);
        auto exit_r = [&](double th) {
            const double c = std::cos(th), s = std::sin(th);
            double r = std::numeric_limits<double>::infinity();
            if (c > 0) r = std::min(r, (1.0 - x.x()) / c);
            if (c < 0) r = std::min(r, -x.x() / c);
            if (s > 0) r = std::min(r, (1.0 - x.y()) / s);
            if (s < 0) r = std::min(r, -x.y() / s);
            return r;
        };
        auto ang = [&](double th) {
            const double rmax = exit_r(th);
            auto rad = [&](double r) {
                const Point2 y{x.x() + r * std::cos(th), x.y() + r * std::sin(th)};
                const Point2 d = px - m.forward(y);
                return r * std::log(d.norm()) / (2.0 * pi) * m.jac_det(y);
            };
            return oracles::integrate_1d(rad, 1e-300, rmax, 1e-10);
        };
        return oracles::integrate_1d(ang, 0.0, 2.0 * pi, 1e-8);
    };

    for (int i : {27, 36, 9}) {
        const Point2 x = grid->points.row(i);
        CHECK(std::abs(conv(i) - oracle_at(x)) < 1e-6);
    }
}

TEST_CASE("pullback metadata survives the cache") {
    auto grid = square_grid(6);
    const DomainMap m = DomainMap::bulged(0.15);
    const ConvOperator op = pullback_operator(m, grid, Kernel::newtonian2d(), 0.03, 2.0);
    const std::string path = "/tmp/nlch_test_map_cache.bin";
    write_operator_cache(path, op.matrix, op.meta);
    const CachedOperator back = read_operator_cache(path);
    CHECK(back.meta.map_kind == ConvMeta::MapKind::bulged);
    CHECK(back.meta.map_params[0] == 0.15);
    CHECK((back.matrix - op.matrix).cwiseAbs().maxCoeff() == 0.0);
}
