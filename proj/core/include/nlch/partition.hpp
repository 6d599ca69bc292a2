#pragma once

#include "nlch/grid.hpp"

#include <array>
#include <stdexcept>
#include <vector>

namespace nlch {

/// Thrown when a partition would contain a degenerate element.
struct GeometryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Planar quadrilateral with counter-clockwise vertices and the bilinear
/// map from the reference square [0,1]^2. Axis-aligned rectangles have an
/// affine map with constant Jacobian.
struct QuadElement {
    std::array<Point2, 4> v;  // CCW
    bool axis_aligned = false;

    Point2 map_ref(double xi, double et) const;
    double jac_det(double xi, double et) const;
    double area() const;

    /// Strict convexity: all interior angles in (0, pi).
    bool convex() const;
};

/// Tiling of the punctured box cl([0,1]^2) \ int(B_inf(x;eps)) by
/// quadrilateral elements, classified by where the eps-box sits.
struct Partition {
    enum class Case { corner, interior, edge };
    enum class Mode { maximal, minimal };

    Case geom_case;
    Mode mode;
    std::vector<QuadElement> elements;
    double hole_area = 0.0;  // area of the clipped eps-box

    double total_area() const;
};

/// Partition the box complement of B_inf(x;eps). Maximal mode yields
/// axis-aligned rectangles (3/8/5 for corner/interior/edge); minimal mode
/// yields general convex quadrilaterals (2/4/3). A coordinate within eps of
/// the boundary is compared closed (<=), so flush geometry never produces
/// zero-width elements; slivers thinner than 1e-13 are dropped.
/// Throws GeometryError on degenerate elements.
Partition partition_box(const Point2& x, double eps, Partition::Mode mode);

}  // namespace nlch
