#include "nlch/grid.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace nlch {

namespace {

constexpr double pi = std::numbers::pi;

// Clenshaw-Curtis weights on [-1,1] for n CGL points, by the explicit
// cosine-sum formula. Returned in ascending-point order; total sum is 2.
Eigen::VectorXd clenshaw_curtis(int n) {
    const int nh = n - 1;
    Eigen::VectorXd w(n);
    if (nh == 1) {
        w << 1.0, 1.0;
        return w;
    }
    const double end = (nh % 2 == 0) ? 1.0 / (nh * nh - 1.0) : 1.0 / (nh * nh);
    w(0) = end;
    w(nh) = end;
    for (int j = 1; j < nh; ++j) {
        const double theta = j * pi / nh;
        double v = 1.0;
        for (int k = 1; k <= nh / 2 - (nh % 2 == 0 ? 1 : 0); ++k)
            v -= 2.0 * std::cos(2.0 * k * theta) / (4.0 * k * k - 1.0);
        if (nh % 2 == 0)
            v -= std::cos(nh * theta) / (nh * nh - 1.0);
        w(j) = 2.0 * v / nh;
    }
    return w;
}

}  // namespace

Grid1D cheb_grid(int n, double a, double b) {
    if (n < 2)
        throw std::invalid_argument("cheb_grid: need at least 2 points");
    if (!(a < b))
        throw std::invalid_argument("cheb_grid: require a < b");

    Grid1D g;
    g.n = n;
    g.a = a;
    g.b = b;
    g.points.resize(n);
    const int nh = n - 1;
    for (int j = 0; j <= nh; ++j)
        g.points(j) = a + (b - a) * (1.0 - std::cos(j * pi / nh)) / 2.0;
    g.points(0) = a;   // exact endpoints
    g.points(nh) = b;

    g.weights = clenshaw_curtis(n) * ((b - a) / 2.0);

    // Barycentric weights for CGL nodes: (-1)^j, halved at the endpoints.
    g.bary.resize(n);
    for (int j = 0; j <= nh; ++j)
        g.bary(j) = (j % 2 == 0 ? 1.0 : -1.0) * ((j == 0 || j == nh) ? 0.5 : 1.0);

    // Differentiation matrix by the barycentric formula; diagonal entries
    // from the negative row-sum trick.
    g.diff.resize(n, n);
    for (int i = 0; i < n; ++i) {
        double rowsum = 0.0;
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const double d = (g.bary(j) / g.bary(i)) / (g.points(i) - g.points(j));
            g.diff(i, j) = d;
            rowsum += d;
        }
        g.diff(i, i) = -rowsum;
    }
    return g;
}

Eigen::RowVectorXd Grid1D::interp_row(double x) const {
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(n);
    for (int j = 0; j < n; ++j) {
        if (x == points(j)) {
            row(j) = 1.0;
            return row;
        }
    }
    double denom = 0.0;
    for (int j = 0; j < n; ++j) {
        const double t = bary(j) / (x - points(j));
        row(j) = t;
        denom += t;
    }
    row /= denom;
    return row;
}

Grid2D tensor_grid(const Grid1D& gx, const Grid1D& gy) {
    Grid2D g;
    g.gx = gx;
    g.gy = gy;
    const int nx = gx.n, ny = gy.n, m = nx * ny;

    g.points.resize(m, 2);
    g.weights.resize(m);
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix) {
            const int k = iy * nx + ix;
            g.points(k, 0) = gx.points(ix);
            g.points(k, 1) = gy.points(iy);
            g.weights(k) = gx.weights(ix) * gy.weights(iy);
        }

    // Dx = I (x) diff_x, Dy = diff_y (x) I, materialized dense.
    g.dx = Eigen::MatrixXd::Zero(m, m);
    g.dy = Eigen::MatrixXd::Zero(m, m);
    for (int iy = 0; iy < ny; ++iy)
        g.dx.block(iy * nx, iy * nx, nx, nx) = gx.diff;
    for (int iy = 0; iy < ny; ++iy)
        for (int jy = 0; jy < ny; ++jy) {
            const double c = gy.diff(iy, jy);
            if (c == 0.0) continue;
            for (int ix = 0; ix < nx; ++ix)
                g.dy(iy * nx + ix, jy * nx + ix) = c;
        }
    g.lap = g.dx * g.dx + g.dy * g.dy;

    // Boundary walk: bottom edge, top edge, then the two side edges.
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix) {
            const bool left = ix == 0, right = ix == nx - 1;
            const bool bottom = iy == 0, top = iy == ny - 1;
            if (!(left || right || bottom || top)) continue;
            Grid2D::BoundaryPoint bp;
            bp.index = iy * nx + ix;
            bp.nx = left ? -1.0 : (right ? 1.0 : 0.0);
            bp.ny = bottom ? -1.0 : (top ? 1.0 : 0.0);
            const double norm = std::hypot(bp.nx, bp.ny);
            bp.nx /= norm;
            bp.ny /= norm;
            g.boundary.push_back(bp);
        }
    return g;
}

Eigen::MatrixXd Grid2D::normal_derivative_rows() const {
    Eigen::MatrixXd rows(boundary.size(), m());
    for (std::size_t k = 0; k < boundary.size(); ++k) {
        const auto& bp = boundary[k];
        rows.row(k) = bp.nx * dx.row(bp.index) + bp.ny * dy.row(bp.index);
    }
    return rows;
}

InterpMatrix barycentric_interp(const Grid2D& src, std::span<const Point2> targets) {
    for (const auto& t : targets)
        if (!std::isfinite(t.x()) || !std::isfinite(t.y()))
            throw std::invalid_argument("barycentric_interp: non-finite target");

    InterpMatrix im;
    im.entries.resize(static_cast<Eigen::Index>(targets.size()), src.m());
    const int nx = src.nx(), ny = src.ny();
    for (std::size_t k = 0; k < targets.size(); ++k) {
        const Eigen::RowVectorXd rx = src.gx.interp_row(targets[k].x());
        const Eigen::RowVectorXd ry = src.gy.interp_row(targets[k].y());
        for (int iy = 0; iy < ny; ++iy)
            for (int ix = 0; ix < nx; ++ix)
                im.entries(k, iy * nx + ix) = rx(ix) * ry(iy);
    }
    return im;
}

}  // namespace nlch
