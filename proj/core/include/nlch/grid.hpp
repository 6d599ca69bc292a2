#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

namespace nlch {

using Point2 = Eigen::Vector2d;

/// Chebyshev-Gauss-Lobatto grid on [a, b] with Clenshaw-Curtis quadrature
/// weights and a spectral differentiation matrix. Points are ascending,
/// points[0] == a and points[n-1] == b. Immutable after construction.
struct Grid1D {
    int n = 0;
    double a = 0.0, b = 1.0;
    Eigen::VectorXd points;
    Eigen::VectorXd weights;  // sum(weights) == b - a
    Eigen::VectorXd bary;     // barycentric weights, shared by interp and diff
    Eigen::MatrixXd diff;

    /// Evaluate the row of barycentric interpolation coefficients for a
    /// target x: c such that p(x) = c . values. Exact unit vector when x
    /// coincides with a node.
    Eigen::RowVectorXd interp_row(double x) const;
};

/// cheb_grid: points[j] = a + (b-a)(1 - cos(j pi/(n-1)))/2.
/// Throws std::invalid_argument for n < 2 or a >= b.
Grid1D cheb_grid(int n, double a, double b);

/// Tensor-product grid in row-major order: index = iy*nx + ix (y outer,
/// x inner). Dense partial-derivative matrices Dx = I (x) diff_x,
/// Dy = diff_y (x) I, Lap = Dx Dx + Dy Dy.
struct Grid2D {
    Grid1D gx, gy;
    Eigen::Matrix<double, Eigen::Dynamic, 2> points;  // M x 2
    Eigen::VectorXd weights;                          // M tensor weights
    Eigen::MatrixXd dx, dy, lap;

    struct BoundaryPoint {
        int index;          // flat index into the tensor grid
        double nx, ny;      // outward normal (corners: both components set)
    };
    std::vector<BoundaryPoint> boundary;  // exactly 2nx + 2ny - 4 entries

    int m() const { return static_cast<int>(points.rows()); }
    int nx() const { return gx.n; }
    int ny() const { return gy.n; }
    int flat(int ix, int iy) const { return iy * gx.n + ix; }

    /// Rows of the outward-normal derivative operator, one per boundary
    /// point, in the order of `boundary`. Corner rows combine both normals.
    Eigen::MatrixXd normal_derivative_rows() const;
};

Grid2D tensor_grid(const Grid1D& gx, const Grid1D& gy);

/// Dense interpolation matrix from grid collocation values to target values.
struct InterpMatrix {
    Eigen::MatrixXd entries;  // rows = targets, cols = src.m()
};

/// Tensor-product barycentric Lagrange interpolation from src to targets.
/// Throws std::invalid_argument if any target coordinate is not finite.
InterpMatrix barycentric_interp(const Grid2D& src, std::span<const Point2> targets);

}  // namespace nlch
