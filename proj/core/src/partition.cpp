#include "nlch/partition.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nlch {

namespace {

constexpr double kSliver = 1e-13;

double cross(const Point2& a, const Point2& b) { return a.x() * b.y() - a.y() * b.x(); }

QuadElement make_rect(double x0, double x1, double y0, double y1) {
    QuadElement q;
    q.v = {Point2{x0, y0}, Point2{x1, y0}, Point2{x1, y1}, Point2{x0, y1}};
    q.axis_aligned = true;
    return q;
}

QuadElement make_quad(Point2 a, Point2 b, Point2 c, Point2 d) {
    QuadElement q;
    q.v = {a, b, c, d};
    q.axis_aligned = false;
    return q;
}

// Reflections used to canonicalize the minimal-mode cases. Each is its own
// inverse; orientation is restored by reversing the vertex cycle.
Point2 flip_x(Point2 p) { return {1.0 - p.x(), p.y()}; }
Point2 flip_y(Point2 p) { return {p.x(), 1.0 - p.y()}; }
Point2 swap_xy(Point2 p) { return {p.y(), p.x()}; }

void apply_transform(std::vector<QuadElement>& els, Point2 (*t)(Point2)) {
    for (auto& q : els) {
        for (auto& p : q.v) p = t(p);
        std::swap(q.v[1], q.v[3]);  // reflection reverses orientation
    }
}

}  // namespace

Point2 QuadElement::map_ref(double xi, double et) const {
    return (1.0 - xi) * (1.0 - et) * v[0] + xi * (1.0 - et) * v[1]
         + xi * et * v[2] + (1.0 - xi) * et * v[3];
}

double QuadElement::jac_det(double xi, double et) const {
    const Point2 dxi = (1.0 - et) * (v[1] - v[0]) + et * (v[2] - v[3]);
    const Point2 det = (1.0 - xi) * (v[3] - v[0]) + xi * (v[2] - v[1]);
    return cross(dxi, det);
}

double QuadElement::area() const {
    double s = 0.0;
    for (int i = 0; i < 4; ++i) {
        const Point2& p = v[i];
        const Point2& q = v[(i + 1) % 4];
        s += p.x() * q.y() - q.x() * p.y();
    }
    return 0.5 * s;
}

bool QuadElement::convex() const {
    for (int i = 0; i < 4; ++i) {
        const Point2 e1 = v[(i + 1) % 4] - v[i];
        const Point2 e2 = v[(i + 2) % 4] - v[(i + 1) % 4];
        if (!(cross(e1, e2) > 0.0))
            return false;
    }
    return true;
}

double Partition::total_area() const {
    double s = 0.0;
    for (const auto& q : elements)
        s += q.area();
    return s;
}

Partition partition_box(const Point2& x, double eps, Partition::Mode mode) {
    if (!(eps > 0.0 && eps < 0.5))
        throw std::invalid_argument("partition_box: eps outside (0, 1/2)");
    if (!(x.x() >= 0.0 && x.x() <= 1.0 && x.y() >= 0.0 && x.y() <= 1.0))
        throw std::invalid_argument("partition_box: point outside [0,1]^2");

    const double l1 = std::max(x.x() - eps, 0.0), r1 = std::min(x.x() + eps, 1.0);
    const double l2 = std::max(x.y() - eps, 0.0), r2 = std::min(x.y() + eps, 1.0);
    const bool tx = (x.x() <= eps) || (x.x() >= 1.0 - eps);
    const bool ty = (x.y() <= eps) || (x.y() >= 1.0 - eps);

    Partition part;
    part.mode = mode;
    part.geom_case = (tx && ty) ? Partition::Case::corner
                   : (tx || ty) ? Partition::Case::edge
                                : Partition::Case::interior;
    part.hole_area = (r1 - l1) * (r2 - l2);

    if (mode == Partition::Mode::maximal) {
        const double xs[4] = {0.0, l1, r1, 1.0};
        const double ys[4] = {0.0, l2, r2, 1.0};
        for (int cy = 0; cy < 3; ++cy)
            for (int cx = 0; cx < 3; ++cx) {
                if (cx == 1 && cy == 1) continue;  // the hole
                const double w = xs[cx + 1] - xs[cx];
                const double h = ys[cy + 1] - ys[cy];
                if (w < kSliver || h < kSliver) continue;
                part.elements.push_back(make_rect(xs[cx], xs[cx + 1], ys[cy], ys[cy + 1]));
            }
    } else {
        // Canonicalize so that a touched side becomes the bottom (and left,
        // for corners), build the layout, then undo the reflections.
        std::vector<Point2 (*)(Point2)> undo;
        double cl1 = l1, cr1 = r1, cl2 = l2, cr2 = r2;
        bool ctx = tx, cty = ty;
        if (ctx && x.x() >= 1.0 - eps) {
            undo.push_back(&flip_x);
            cl1 = 1.0 - r1;
            cr1 = 1.0 - l1;
        }
        if (cty && x.y() >= 1.0 - eps) {
            undo.push_back(&flip_y);
            cl2 = 1.0 - r2;
            cr2 = 1.0 - l2;
        }
        if (ctx && !cty) {
            undo.push_back(&swap_xy);
            std::swap(cl1, cl2);
            std::swap(cr1, cr2);
            std::swap(ctx, cty);
        }

        auto& els = part.elements;
        if (ctx && cty) {
            // Box at the bottom-left corner: its free corner joins the
            // opposite corner of the square.
            els.push_back(make_quad({0.0, cr2}, {cr1, cr2}, {1, 1}, {0, 1}));
            els.push_back(make_quad({cr1, 0.0}, {1, 0}, {1, 1}, {cr1, cr2}));
        } else if (cty) {
            // Box on the bottom edge: its top corners join the top corners
            // of the square.
            els.push_back(make_quad({0, 0}, {cl1, 0.0}, {cl1, cr2}, {0, 1}));
            els.push_back(make_quad({cl1, cr2}, {cr1, cr2}, {1, 1}, {0, 1}));
            els.push_back(make_quad({cr1, 0.0}, {1, 0}, {1, 1}, {cr1, cr2}));
        } else {
            // Interior: join each box corner to the matching square corner.
            els.push_back(make_quad({0, 0}, {1, 0}, {cr1, cl2}, {cl1, cl2}));
            els.push_back(make_quad({1, 0}, {1, 1}, {cr1, cr2}, {cr1, cl2}));
            els.push_back(make_quad({1, 1}, {0, 1}, {cl1, cr2}, {cr1, cr2}));
            els.push_back(make_quad({0, 1}, {0, 0}, {cl1, cl2}, {cl1, cr2}));
        }
        for (auto it = undo.rbegin(); it != undo.rend(); ++it)
            apply_transform(els, *it);
    }

    for (const auto& q : part.elements) {
        if (!(q.area() > 1e-14) || !q.convex()) {
            std::ostringstream msg;
            msg << "partition_box: degenerate element at x = (" << x.x() << ", "
                << x.y() << "), eps = " << eps;
            throw GeometryError(msg.str());
        }
    }
    return part;
}

}  // namespace nlch
