#pragma once

#include "nlch/grid.hpp"
#include "nlch/kernel.hpp"
#include "nlch/partition.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>

namespace nlch {

/// Thrown when an assembly would exceed the desk-scale memory budget.
struct ResourceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Provenance metadata carried by every discrete convolution operator and
/// persisted in the binary cache format.
struct ConvMeta {
    enum class Mode : std::uint32_t { maximal = 0, minimal = 1, direct = 2 };
    enum class KernelId : std::uint32_t { newt2d = 0, newt3d = 1, newt3d_reg = 2, moll = 3, mix = 4 };
    enum class MapKind : std::uint32_t { none = 0, rectangle = 1, bulged = 2 };

    std::uint64_t m = 0;   // matrix dimension
    std::uint64_t n = 0;   // per-axis grid resolution
    double eps = 0.0;
    double alpha = 0.0;
    Mode mode = Mode::maximal;
    KernelId kernel_id = KernelId::newt2d;
    double eta = 1.0;
    bool corrected = false;

    MapKind map_kind = MapKind::none;          // plain square when none
    std::array<double, 4> map_params{};        // rectangle: a1,b1,a2,b2; bulged: k

    static KernelId kernel_id_of(const Kernel& k);
};

/// Dense M x M matrix approximating rho |-> K * rho at the collocation
/// points. Immutable once assembled; safe to share across threads.
struct ConvOperator {
    std::shared_ptr<const Grid2D> grid;  // null for 3D operators
    Eigen::MatrixXd matrix;
    ConvMeta meta;

    Eigen::VectorXd apply(const Eigen::VectorXd& rho) const { return matrix * rho; }
};

/// One row of the multishape assembly: quadrature of the kernel over the
/// partition of [0,1]^2 \ B_inf(x_i;eps), interpolated back to the base grid.
/// The kernel is never evaluated inside the cutoff box. Requires alpha*N
/// integer.
Eigen::RowVectorXd assemble_row(const Grid2D& grid, int i, const Kernel& kernel,
                                double eps, double alpha, Partition::Mode mode);

/// Assemble all rows; when `correct` is set, add the exact near-field
/// correction eta * G_eps on the diagonal (2D Newtonian kernel only).
/// `threads` <= 0 uses the hardware concurrency.
ConvOperator assemble_operator(std::shared_ptr<const Grid2D> grid, const Kernel& kernel,
                               double eps, double alpha, Partition::Mode mode,
                               bool correct, int threads = 0);

/// Direct product-quadrature assembly for bounded kernels (mollifier,
/// regularized kinds): matrix(i,j) = kernel(x_i - x_j) w_j.
ConvOperator assemble_direct_2d(std::shared_ptr<const Grid2D> grid, const Kernel& kernel);

/// Entrywise eta * (A + w B). Grids and shapes must match.
ConvOperator mixture(const ConvOperator& a, const ConvOperator& b, double w, double eta);

/// Pointwise validation error e_eps(x) = |J(x) - I1[1](x) - G_eps(x)|
/// against the closed forms. Requires the plain-square 2D Newtonian
/// operator with eta = 1.
struct ValidationReport {
    Eigen::VectorXd e_per_point;
    double max_e = 0.0;
    double mean_e = 0.0;
    double max_abs_g = 0.0;           // analytic max |G_eps| over the grid
    double max_uncorrected = 0.0;     // max |J - I1[1]| (no correction term)
};
ValidationReport validate(const ConvOperator& op);

/// Tensor Chebyshev grid on the cube B_inf(0;1), z-outer ordering.
struct Grid3D {
    Grid1D g;
    Eigen::Matrix<double, Eigen::Dynamic, 3> points;
    Eigen::VectorXd weights;

    int m() const { return static_cast<int>(points.rows()); }
    double min_spacing() const;
};
Grid3D tensor_grid_3d(const Grid1D& g);

/// 3D convolution operator for bounded-kernel direct quadrature:
/// matrix(i,j) = eta K_sigma(x_i - x_j) w_j. Guards the dense matrix
/// against a 2 GiB budget (ResourceError).
struct ConvOperator3D {
    std::shared_ptr<const Grid3D> grid;
    Eigen::MatrixXd matrix;
    ConvMeta meta;
};
ConvOperator3D assemble_operator_3d(std::shared_ptr<const Grid3D> grid, const Kernel& kernel);

namespace detail {

/// Pointwise integrand for one operator row: value at source point y for the
/// row's collocation point x_i. Plain convolutions use K(x_i - y); mapped
/// domains substitute K(Psi(x_i) - Psi(y)).
using PointKernel = std::function<double(const Point2& xi, const Point2& y)>;

/// Multishape row assembly against an arbitrary point kernel. No diagonal
/// correction is applied; metadata is left for the caller to fill.
ConvOperator assemble_operator_custom(std::shared_ptr<const Grid2D> grid,
                                      const PointKernel& fn, double eps, double alpha,
                                      Partition::Mode mode, int threads);

}  // namespace detail

/// Binary cache (shared with the CLI): 16-byte magic "NLCHCONVOP-v1\0\0\0",
/// little-endian header fields, optional map TLV, then row-major f64 data.
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
void write_operator_cache(const std::string& path, const Eigen::MatrixXd& matrix,
                          const ConvMeta& meta);
struct CachedOperator {
    Eigen::MatrixXd matrix;
    ConvMeta meta;
};
CachedOperator read_operator_cache(const std::string& path);

}  // namespace nlch
