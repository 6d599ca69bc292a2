#include "nlch/domain_map.hpp"

#include "nlch/closed_forms.hpp"

#include <cmath>
#include <stdexcept>

namespace nlch {

namespace {

// Composite Gauss-Legendre(8) on [0,1], geometrically graded toward 0.
// Handles the r log r type corner behaviour left by the bilinear map.
struct Graded1D {
    std::vector<double> pts, w;
};

Graded1D graded_rule(int layers) {
    static const double gx[8] = {0.01985507175123188, 0.10166676129318664,
                                 0.2372337950418355,  0.40828267875217505,
                                 0.5917173212478249,  0.7627662049581645,
                                 0.8983332387068134,  0.9801449282487681};
    static const double gw[8] = {0.05061426814518813, 0.11119051722668723,
                                 0.15685332293894363, 0.18134189168918097,
                                 0.18134189168918097, 0.15685332293894363,
                                 0.11119051722668723, 0.05061426814518813};
    // The grading stops at 4^-layers instead of closing the interval: the
    // integrand is r log r near the corner, so the truncated mass is below
    // 1e-18 while quadrature points stay clear of the singular point.
    Graded1D r;
    double hi = 1.0;
    for (int l = 0; l < layers; ++l) {
        const double lo = hi / 4.0;
        for (int q = 0; q < 8; ++q) {
            r.pts.push_back(lo + (hi - lo) * gx[q]);
            r.w.push_back((hi - lo) * gw[q]);
        }
        hi = lo;
    }
    return r;
}

// Near-field correction for a mapped kernel: integral of
// K(Psi(x) - Psi(y)) |det J(y)| over the clipped box B_inf(x;eps) cap [0,1]^2,
// by graded quadrature on up to four rectangles cornered at x.
double mapped_near_field(const DomainMap& map, const Kernel& kernel, const Point2& x,
                         double eps) {
    static const Graded1D rule = graded_rule(16);
    const Point2 px = map.forward(x);
    const double ext[4][2] = {
        {std::min(eps, x.x()), std::min(eps, x.y())},
        {std::min(eps, 1.0 - x.x()), std::min(eps, x.y())},
        {std::min(eps, x.x()), std::min(eps, 1.0 - x.y())},
        {std::min(eps, 1.0 - x.x()), std::min(eps, 1.0 - x.y())}};
    const double sx[4] = {-1.0, 1.0, -1.0, 1.0};
    const double sy[4] = {-1.0, -1.0, 1.0, 1.0};

    double total = 0.0;
    for (int q = 0; q < 4; ++q) {
        const double ax = ext[q][0], ay = ext[q][1];
        if (ax <= 0.0 || ay <= 0.0) continue;
        double acc = 0.0;
        for (std::size_t a = 0; a < rule.pts.size(); ++a)
            for (std::size_t b = 0; b < rule.pts.size(); ++b) {
                const Point2 y{x.x() + sx[q] * ax * rule.pts[a],
                               x.y() + sy[q] * ay * rule.pts[b]};
                const Point2 d = px - map.forward(y);
                acc += kernel.eval2(d.x(), d.y()) * map.jac_det(y)
                     * rule.w[a] * rule.w[b];
            }
        total += acc * ax * ay;
    }
    return total;
}

}  // namespace

DomainMap DomainMap::rectangle(double a1, double b1, double a2, double b2) {
    if (!(a1 < b1 && a2 < b2))
        throw std::invalid_argument("DomainMap::rectangle: degenerate rectangle");
    DomainMap m;
    m.kind = Kind::rectangle;
    m.a1 = a1;
    m.b1 = b1;
    m.a2 = a2;
    m.b2 = b2;
    return m;
}

DomainMap DomainMap::bulged(double k) {
    if (!(k > -0.5 && k < 0.5))
        throw std::invalid_argument("DomainMap::bulged: k outside (-1/2, 1/2)");
    DomainMap m;
    m.kind = Kind::bulged;
    m.k = k;
    return m;
}

Point2 DomainMap::forward(const Point2& x) const {
    if (kind == Kind::rectangle)
        return {(b1 - a1) * x.x() + a1, (b2 - a2) * x.y() + a2};
    const double u = 2.0 * x.x() - 1.0, v = 2.0 * x.y() - 1.0;
    return {u * (1.0 + 4.0 * k * x.y() * (1.0 - x.y())),
            v * (1.0 + 4.0 * k * x.x() * (1.0 - x.x()))};
}

double DomainMap::jac_det(const Point2& x) const {
    if (kind == Kind::rectangle)
        return std::abs((b1 - a1) * (b2 - a2));
    const double j11 = 2.0 + 8.0 * k * x.y() * (1.0 - x.y());
    const double j22 = 2.0 + 8.0 * k * x.x() * (1.0 - x.x());
    const double j12 = -4.0 * k * (1.0 - 2.0 * x.x()) * (1.0 - 2.0 * x.y());
    return j11 * j22 - j12 * j12;
}

ConvOperator pullback_operator(const DomainMap& map, std::shared_ptr<const Grid2D> grid,
                               const Kernel& kernel, double eps, double alpha,
                               int threads) {
    const detail::PointKernel fn = [&map, kernel](const Point2& xi, const Point2& y) {
        const Point2 d = map.forward(xi) - map.forward(y);
        return kernel.eval2(d.x(), d.y());
    };
    ConvOperator op = detail::assemble_operator_custom(grid, fn, eps, alpha,
                                                       Partition::Mode::maximal, threads);

    // C_{K,Theta} u = C_{K o Psi, Omega} diag(j) u.
    const int m = grid->m();
    Eigen::VectorXd j(m);
    for (int i = 0; i < m; ++i)
        j(i) = map.jac_det(grid->points.row(i));
    op.matrix = op.matrix * j.asDiagonal();

    // Near field acts on u_i itself (the Jacobian factor is already inside
    // the integral): exact scaled-box closed form for the affine rectangle
    // map with the 2D Newtonian kernel, graded quadrature otherwise.
    if (map.kind == DomainMap::Kind::rectangle && kernel.kind == Kernel::Kind::newtonian2d) {
        const double s1 = map.b1 - map.a1, s2 = map.b2 - map.a2;
        for (int i = 0; i < m; ++i) {
            const double x1 = grid->points(i, 0), x2 = grid->points(i, 1);
            const double a1 = s1 * std::min(x1, eps), b1 = s1 * std::min(1.0 - x1, eps);
            const double a2 = s2 * std::min(x2, eps), b2 = s2 * std::min(1.0 - x2, eps);
            op.matrix(i, i) += kernel.eta
                             * (I_quadrant(a1, a2) + I_quadrant(b1, a2)
                                + I_quadrant(a1, b2) + I_quadrant(b1, b2));
        }
    } else {
        for (int i = 0; i < m; ++i)
            op.matrix(i, i) += mapped_near_field(map, kernel, grid->points.row(i), eps);
    }

    op.meta.kernel_id = ConvMeta::kernel_id_of(kernel);
    op.meta.eta = kernel.eta;
    op.meta.corrected = true;
    if (map.kind == DomainMap::Kind::rectangle) {
        op.meta.map_kind = ConvMeta::MapKind::rectangle;
        op.meta.map_params = {map.a1, map.b1, map.a2, map.b2};
    } else {
        op.meta.map_kind = ConvMeta::MapKind::bulged;
        op.meta.map_params = {map.k, 0, 0, 0};
    }
    return op;
}

}  // namespace nlch
