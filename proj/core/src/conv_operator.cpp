#include "nlch/conv_operator.hpp"

#include "nlch/closed_forms.hpp"

#include <cassert>
#include <cmath>
#include <thread>

namespace nlch {

namespace {

// Reference CGL points and Clenshaw-Curtis weights on [0,1], shared by all
// elements of a partition.
struct RefGrid {
    Eigen::VectorXd pts, w;
};

RefGrid make_ref(int p) {
    const Grid1D g = cheb_grid(p, 0.0, 1.0);
    return {g.points, g.weights};
}

int local_points_per_axis(double alpha, int n) {
    const double an = alpha * n;
    const int p = static_cast<int>(std::lround(an));
    if (std::abs(an - p) > 1e-9 || p < 2)
        throw std::invalid_argument("assemble: alpha*N must be a positive integer");
    return p;
}

// Compensated accumulation of element contributions into a row.
struct KahanRow {
    Eigen::VectorXd sum, comp;
    explicit KahanRow(int m) : sum(Eigen::VectorXd::Zero(m)), comp(Eigen::VectorXd::Zero(m)) {}
    void add(int idx, double v) {
        const double y = v - comp(idx);
        const double t = sum(idx) + y;
        comp(idx) = (t - sum(idx)) - y;
        sum(idx) = t;
    }
};

using PointKernel = std::function<double(const Point2&, const Point2&)>;

Eigen::RowVectorXd assemble_row_impl(const Grid2D& grid, const Point2& xi,
                                     const PointKernel& fn, double eps, double alpha,
                                     Partition::Mode mode, const RefGrid& ref) {
    const int nx = grid.nx(), ny = grid.ny(), m = grid.m();
    const int p = static_cast<int>(ref.pts.size());
    const Partition part = partition_box(xi, eps, mode);

    KahanRow row(m);
    Eigen::MatrixXd ix_rows(p, nx), iy_rows(p, ny), kmat(p, p);
    for (const auto& elem : part.elements) {
        if (elem.axis_aligned) {
            const double ex0 = elem.v[0].x(), ex1 = elem.v[1].x();
            const double ey0 = elem.v[0].y(), ey1 = elem.v[3].y();
            const double wx = ex1 - ex0, wy = ey1 - ey0;
            Eigen::VectorXd lx = ex0 + wx * ref.pts.array();
            Eigen::VectorXd ly = ey0 + wy * ref.pts.array();
            for (int a = 0; a < p; ++a) {
                ix_rows.row(a) = grid.gx.interp_row(lx(a));
                iy_rows.row(a) = grid.gy.interp_row(ly(a));
            }
            for (int b = 0; b < p; ++b)
                for (int a = 0; a < p; ++a) {
                    const Point2 y{lx(a), ly(b)};
                    assert(std::max(std::abs(xi.x() - y.x()), std::abs(xi.y() - y.y()))
                           >= eps * (1.0 - 1e-9));
                    kmat(a, b) = fn(xi, y) * (ref.w(a) * wx) * (ref.w(b) * wy);
                }
            const Eigen::MatrixXd contrib = ix_rows.transpose() * kmat * iy_rows;  // nx x ny
            for (int jy = 0; jy < ny; ++jy)
                for (int jx = 0; jx < nx; ++jx)
                    row.add(jy * nx + jx, contrib(jx, jy));
        } else {
            std::vector<long double> acc(static_cast<std::size_t>(m), 0.0L);
            for (int b = 0; b < p; ++b)
                for (int a = 0; a < p; ++a) {
                    const double s = ref.pts(a), t = ref.pts(b);
                    const Point2 y = elem.map_ref(s, t);
                    assert(std::max(std::abs(xi.x() - y.x()), std::abs(xi.y() - y.y()))
                           >= eps * (1.0 - 1e-9));
                    const double c = fn(xi, y) * ref.w(a) * ref.w(b) * elem.jac_det(s, t);
                    const Eigen::RowVectorXd bx = grid.gx.interp_row(y.x());
                    const Eigen::RowVectorXd by = grid.gy.interp_row(y.y());
                    for (int jy = 0; jy < ny; ++jy) {
                        const long double cby = static_cast<long double>(c * by(jy));
                        long double* dst = acc.data() + static_cast<std::size_t>(jy) * nx;
                        for (int jx = 0; jx < nx; ++jx)
                            dst[jx] += cby * bx(jx);
                    }
                }
            for (int j = 0; j < m; ++j)
                row.add(j, static_cast<double>(acc[j]));
        }
    }
    return row.sum.transpose();
}

detail::PointKernel displacement_kernel(const Kernel& k) {
    return [k](const Point2& xi, const Point2& y) { return k.eval2(xi.x() - y.x(), xi.y() - y.y()); };
}

}  // namespace

namespace detail {

ConvOperator assemble_operator_custom(std::shared_ptr<const Grid2D> grid,
                                      const PointKernel& fn, double eps, double alpha,
                                      Partition::Mode mode, int threads) {
    if (!grid)
        throw std::invalid_argument("assemble_operator_custom: null grid");
    const int m = grid->m();
    const int p = local_points_per_axis(alpha, grid->nx());
    local_points_per_axis(alpha, grid->ny());
    const RefGrid ref = make_ref(p);

    ConvOperator op;
    op.grid = grid;
    op.matrix.resize(m, m);

    int nthreads = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    nthreads = std::max(1, std::min(nthreads, m));
    auto worker = [&](int begin, int end) {
        for (int i = begin; i < end; ++i) {
            const Point2 xi = grid->points.row(i);
            op.matrix.row(i) = assemble_row_impl(*grid, xi, fn, eps, alpha, mode, ref);
        }
    };
    if (nthreads == 1) {
        worker(0, m);
    } else {
        std::vector<std::thread> pool;
        const int chunk = (m + nthreads - 1) / nthreads;
        for (int t = 0; t < nthreads; ++t)
            pool.emplace_back(worker, t * chunk, std::min(m, (t + 1) * chunk));
        for (auto& th : pool)
            th.join();
    }
    op.meta.m = static_cast<std::uint64_t>(m);
    op.meta.n = static_cast<std::uint64_t>(grid->nx());
    op.meta.eps = eps;
    op.meta.alpha = alpha;
    op.meta.mode = mode == Partition::Mode::maximal ? ConvMeta::Mode::maximal
                                                    : ConvMeta::Mode::minimal;
    return op;
}

}  // namespace detail

ConvMeta::KernelId ConvMeta::kernel_id_of(const Kernel& k) {
    switch (k.kind) {
        case Kernel::Kind::newtonian2d: return KernelId::newt2d;
        case Kernel::Kind::newtonian3d: return KernelId::newt3d;
        case Kernel::Kind::newtonian3d_reg: return KernelId::newt3d_reg;
        case Kernel::Kind::mollifier: return KernelId::moll;
        case Kernel::Kind::composite: return KernelId::mix;
    }
    throw std::logic_error("kernel_id_of: unknown kind");
}

Eigen::RowVectorXd assemble_row(const Grid2D& grid, int i, const Kernel& kernel,
                                double eps, double alpha, Partition::Mode mode) {
    if (i < 0 || i >= grid.m())
        throw std::invalid_argument("assemble_row: row index out of range");
    const int px = local_points_per_axis(alpha, grid.nx());
    local_points_per_axis(alpha, grid.ny());
    const RefGrid ref = make_ref(px);
    const Point2 xi = grid.points.row(i);
    return assemble_row_impl(grid, xi, displacement_kernel(kernel), eps, alpha, mode, ref);
}

ConvOperator assemble_operator(std::shared_ptr<const Grid2D> grid, const Kernel& kernel,
                               double eps, double alpha, Partition::Mode mode,
                               bool correct, int threads) {
    if (correct && kernel.kind != Kernel::Kind::newtonian2d)
        throw std::invalid_argument(
            "assemble_operator: near-field correction is defined for the 2D Newtonian kernel");
    ConvOperator op = detail::assemble_operator_custom(grid, displacement_kernel(kernel),
                                                       eps, alpha, mode, threads);
    if (correct)
        for (int i = 0; i < grid->m(); ++i)
            op.matrix(i, i) += kernel.eta * G_eps_square(grid->points(i, 0), grid->points(i, 1), eps);

    op.meta.kernel_id = ConvMeta::kernel_id_of(kernel);
    op.meta.eta = kernel.eta;
    op.meta.corrected = correct;
    return op;
}

ConvOperator assemble_direct_2d(std::shared_ptr<const Grid2D> grid, const Kernel& kernel) {
    if (!grid)
        throw std::invalid_argument("assemble_direct_2d: null grid");
    if (kernel.singular())
        throw std::invalid_argument("assemble_direct_2d: kernel must be bounded");
    const int m = grid->m();
    ConvOperator op;
    op.grid = grid;
    op.matrix.resize(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            op.matrix(i, j) = kernel.eval2(grid->points(i, 0) - grid->points(j, 0),
                                           grid->points(i, 1) - grid->points(j, 1))
                            * grid->weights(j);
    op.meta.m = static_cast<std::uint64_t>(m);
    op.meta.n = static_cast<std::uint64_t>(grid->nx());
    op.meta.mode = ConvMeta::Mode::direct;
    op.meta.kernel_id = ConvMeta::kernel_id_of(kernel);
    op.meta.eta = kernel.eta;
    return op;
}

ConvOperator mixture(const ConvOperator& a, const ConvOperator& b, double w, double eta) {
    if (a.matrix.rows() != b.matrix.rows() || a.matrix.cols() != b.matrix.cols())
        throw std::invalid_argument("mixture: operator shapes differ");
    if (a.grid && b.grid && a.grid->m() != b.grid->m())
        throw std::invalid_argument("mixture: operator grids differ");
    ConvOperator op;
    op.grid = a.grid ? a.grid : b.grid;
    op.matrix = eta * (a.matrix + w * b.matrix);
    op.meta = a.meta;
    op.meta.kernel_id = ConvMeta::KernelId::mix;
    op.meta.eta = eta;
    op.meta.corrected = a.meta.corrected || b.meta.corrected;
    return op;
}

ValidationReport validate(const ConvOperator& op) {
    if (op.meta.kernel_id != ConvMeta::KernelId::newt2d || op.meta.eta != 1.0
        || op.meta.map_kind != ConvMeta::MapKind::none || !op.grid)
        throw std::invalid_argument("validate: requires the plain-square 2D Newtonian operator with eta = 1");
    const auto& grid = *op.grid;
    const int m = grid.m();
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(m);
    const Eigen::VectorXd op_one = op.matrix * ones;

    ValidationReport rep;
    rep.e_per_point.resize(m);
    double sum = 0.0;
    for (int i = 0; i < m; ++i) {
        const double x1 = grid.points(i, 0), x2 = grid.points(i, 1);
        const double j = J_square(x1, x2);
        const double g = G_eps_square(x1, x2, op.meta.eps);
        const double i1 = op.meta.corrected ? op_one(i) - g : op_one(i);
        const double e = std::abs(j - i1 - g);
        rep.e_per_point(i) = e;
        sum += e;
        rep.max_e = std::max(rep.max_e, e);
        rep.max_abs_g = std::max(rep.max_abs_g, std::abs(g));
        rep.max_uncorrected = std::max(rep.max_uncorrected, std::abs(j - i1));
    }
    rep.mean_e = sum / m;
    return rep;
}

double Grid3D::min_spacing() const {
    double d = g.points(1) - g.points(0);
    for (int i = 1; i + 1 < g.n; ++i)
        d = std::min(d, g.points(i + 1) - g.points(i));
    return d;
}

Grid3D tensor_grid_3d(const Grid1D& g) {
    Grid3D out;
    out.g = g;
    const int n = g.n;
    const Eigen::Index m = static_cast<Eigen::Index>(n) * n * n;
    out.points.resize(m, 3);
    out.weights.resize(m);
    Eigen::Index k = 0;
    for (int iz = 0; iz < n; ++iz)
        for (int iy = 0; iy < n; ++iy)
            for (int ix = 0; ix < n; ++ix, ++k) {
                out.points(k, 0) = g.points(ix);
                out.points(k, 1) = g.points(iy);
                out.points(k, 2) = g.points(iz);
                out.weights(k) = g.weights(ix) * g.weights(iy) * g.weights(iz);
            }
    return out;
}

ConvOperator3D assemble_operator_3d(std::shared_ptr<const Grid3D> grid, const Kernel& kernel) {
    if (!grid)
        throw std::invalid_argument("assemble_operator_3d: null grid");
    if (kernel.kind != Kernel::Kind::newtonian3d_reg)
        throw std::invalid_argument("assemble_operator_3d: kernel must be the regularized 3D Newtonian");
    const std::int64_t m = grid->m();
    constexpr std::int64_t kBudget = std::int64_t{2} << 30;  // 2 GiB
    if (m * m * 8 > kBudget)
        throw ResourceError("assemble_operator_3d: dense matrix exceeds the 2 GiB budget");

    ConvOperator3D op;
    op.grid = grid;
    op.matrix.resize(m, m);
    for (std::int64_t i = 0; i < m; ++i)
        for (std::int64_t j = 0; j < m; ++j)
            op.matrix(i, j) = kernel.eval3(grid->points(i, 0) - grid->points(j, 0),
                                           grid->points(i, 1) - grid->points(j, 1),
                                           grid->points(i, 2) - grid->points(j, 2))
                            * grid->weights(j);
    op.meta.m = static_cast<std::uint64_t>(m);
    op.meta.n = static_cast<std::uint64_t>(grid->g.n);
    op.meta.eps = kernel.sigma;  // sigma stored in the eps slot for direct 3D
    op.meta.alpha = 0.0;
    op.meta.mode = ConvMeta::Mode::direct;
    op.meta.kernel_id = ConvMeta::KernelId::newt3d_reg;
    op.meta.eta = kernel.eta;
    return op;
}

}  // namespace nlch
