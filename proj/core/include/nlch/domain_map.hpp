#pragma once

#include "nlch/conv_operator.hpp"

namespace nlch {

/// Diffeomorphism Psi from cl([0,1]^2) onto a mapped domain Theta, with its
/// Jacobian determinant. rectangle(a1,b1,a2,b2) is the affine map onto
/// (a1,b1) x (a2,b2); bulged(k) maps onto the bulged square, requiring
/// k in (-1/2, 1/2) so that det J >= 4(1 - 4k^2) > 0.
struct DomainMap {
    enum class Kind { rectangle, bulged };

    Kind kind;
    double a1 = 0, b1 = 1, a2 = 0, b2 = 1;  // rectangle corners
    double k = 0.0;                         // bulge parameter

    static DomainMap rectangle(double a1, double b1, double a2, double b2);
    static DomainMap bulged(double k);

    Point2 forward(const Point2& x) const;
    double jac_det(const Point2& x) const;
};

/// Convolution operator on the mapped domain, acting on samples at the
/// mapped collocation points: assembled on the unit square with kernel value
/// K(Psi(x_i) - Psi(y)), near-field corrected, and right-multiplied by
/// diag(|det J|) at the collocation points.
ConvOperator pullback_operator(const DomainMap& map, std::shared_ptr<const Grid2D> grid,
                               const Kernel& kernel, double eps, double alpha,
                               int threads = 0);

}  // namespace nlch
