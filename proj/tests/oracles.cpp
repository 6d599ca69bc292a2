#include "oracles.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace oracles {

namespace {

constexpr double pi = std::numbers::pi;

// Gauss-Legendre 15-point nodes/weights on [-1,1].
constexpr int kGl = 15;
const double kGlX[kGl] = {
    -0.9879925180204854, -0.9372733924007060, -0.8482065834104272,
    -0.7244177313601700, -0.5709721726085388, -0.3941513470775634,
    -0.2011940939974345, 0.0,                 0.2011940939974345,
    0.3941513470775634,  0.5709721726085388,  0.7244177313601700,
    0.8482065834104272,  0.9372733924007060,  0.9879925180204854};
const double kGlW[kGl] = {
    0.03075324199611727, 0.07036604748810812, 0.10715922046717194,
    0.13957067792615432, 0.16626920581699392, 0.18616100001556221,
    0.19843148532711158, 0.20257824192556127, 0.19843148532711158,
    0.18616100001556221, 0.16626920581699392, 0.13957067792615432,
    0.10715922046717194, 0.07036604748810812, 0.03075324199611727};

double gl15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < kGl; ++i)
        s += kGlW[i] * f(c + h * kGlX[i]);
    return s * h;
}

double adapt_1d(const std::function<double(double)>& f, double a, double b,
                double tol, double whole, int depth) {
    const double m = 0.5 * (a + b);
    const double left = gl15(f, a, m), right = gl15(f, m, b);
    if (depth > 48)
        return left + right;
    if (std::abs(left + right - whole) < tol)
        return left + right;
    return adapt_1d(f, a, m, tol / 2, left, depth + 1)
         + adapt_1d(f, m, b, tol / 2, right, depth + 1);
}

}  // namespace

double integrate_1d(const std::function<double(double)>& f, double a, double b,
                    double tol) {
    return adapt_1d(f, a, b, tol, gl15(f, a, b), 0);
}

double integrate_2d(const std::function<double(double, double)>& f, double ax,
                    double bx, double ay, double by, double tol) {
    auto outer = [&](double y) {
        return integrate_1d([&](double x) { return f(x, y); }, ax, bx, tol / (by - ay) / 8);
    };
    return integrate_1d(outer, ay, by, tol);
}

double log_rect(double a, double b, double tol) {
    if (a <= 0.0 || b <= 0.0)
        return 0.0;
    // Split [0,a] x [0,b] along the diagonal to (a,b); on each triangle the
    // radial integral of log(r) r dr is R^2/2 (log R - 1/2) analytically.
    auto radial = [](double r) { return 0.5 * r * r * (std::log(r) - 0.5); };
    auto lower = [&](double th) { return radial(a / std::cos(th)); };
    auto upper = [&](double th) { return radial(b / std::sin(th)); };
    const double split = std::atan2(b, a);
    const double v = integrate_1d(lower, 0.0, split, tol * pi)
                   + integrate_1d(upper, split, pi / 2, tol * pi);
    return v / (2.0 * pi);
}

double log_square_conv(double x1, double x2, double tol) {
    return log_rect(x1, x2, tol) + log_rect(1.0 - x1, x2, tol)
         + log_rect(x1, 1.0 - x2, tol) + log_rect(1.0 - x1, 1.0 - x2, tol);
}

double log_near_field(double x1, double x2, double eps, double tol) {
    const double a1 = std::min(x1, eps), b1 = std::min(1.0 - x1, eps);
    const double a2 = std::min(x2, eps), b2 = std::min(1.0 - x2, eps);
    return log_rect(a1, a2, tol) + log_rect(b1, a2, tol) + log_rect(a1, b2, tol)
         + log_rect(b1, b2, tol);
}

double log_lens(double x_norm, double eps, double tol) {
    // Region B2(0;eps) cap B2(x;1) in polar coordinates about the origin,
    // with x on the positive axis. The second constraint gives the ray exit
    // radius r+ = x cos(th) + sqrt(1 - x^2 sin^2(th)).
    const double a = x_norm;
    auto radial = [](double r) { return r > 0 ? 0.5 * r * r * (std::log(r) - 0.5) : 0.0; };
    auto g = [&](double th) {
        const double s = a * std::sin(th);
        const double disc = 1.0 - s * s;
        if (disc <= 0.0)
            return 0.0;
        const double rplus = a * std::cos(th) + std::sqrt(disc);
        const double r = std::min(eps, std::max(rplus, 0.0));
        return radial(r);
    };
    return integrate_1d(g, 0.0, 2.0 * pi, tol * pi) / (2.0 * pi);
}

double log_disc_conv(double x_norm, double tol) {
    // J(x) = (1/2pi) int_disc log||x-y|| dy; polar about x, the unit-circle
    // exit radius along direction th is -x cos(th) + sqrt(1 - x^2 sin^2 th).
    const double a = x_norm;
    auto radial = [](double r) { return r > 0 ? 0.5 * r * r * (std::log(r) - 0.5) : 0.0; };
    auto g = [&](double th) {
        const double s = a * std::sin(th);
        const double disc = 1.0 - s * s;
        if (disc <= 0.0)
            return 0.0;
        return radial(-a * std::cos(th) + std::sqrt(disc));
    };
    // Symmetric in th; integrate the half range twice.
    return 2.0 * integrate_1d(g, 0.0, pi, tol * pi) / (2.0 * pi);
}

std::complex<double> dilog_contour(std::complex<double> z, double tol) {
    if (std::abs(z) >= 1.0)
        throw std::invalid_argument("dilog_contour: requires |z| < 1");
    auto re = [&](double s) {
        if (s == 0.0)
            return z.real();
        return (-std::log(std::complex<double>(1.0, 0.0) - s * z) / s).real();
    };
    auto im = [&](double s) {
        if (s == 0.0)
            return z.imag();
        return (-std::log(std::complex<double>(1.0, 0.0) - s * z) / s).imag();
    };
    return {integrate_1d(re, 0.0, 1.0, tol), integrate_1d(im, 0.0, 1.0, tol)};
}

namespace {

// Integral of 1/||u|| over [0,a] x [0,b] x [0,c] with the singularity at the
// corner: spherical coordinates, radial part analytic
// (int_0^R r^-1 r^2 dr = R^2/2), adaptive over the solid angle.
double corner_box_inv_norm(double a, double b, double c, double tol) {
    if (a <= 0.0 || b <= 0.0 || c <= 0.0)
        return 0.0;
    auto exit_radius = [&](double th, double ph) {
        const double ex = std::sin(ph) * std::cos(th);
        const double ey = std::sin(ph) * std::sin(th);
        const double ez = std::cos(ph);
        double r = std::numeric_limits<double>::infinity();
        if (ex > 0) r = std::min(r, a / ex);
        if (ey > 0) r = std::min(r, b / ey);
        if (ez > 0) r = std::min(r, c / ez);
        return r;
    };
    auto outer = [&](double ph) {
        auto inner = [&](double th) {
            const double r = exit_radius(th, ph);
            return 0.5 * r * r;
        };
        return std::sin(ph) * integrate_1d(inner, 0.0, pi / 2, tol);
    };
    return integrate_1d(outer, 0.0, pi / 2, tol);
}

}  // namespace

double box_inv_norm(double x1, double x2, double y1, double y2, double z1,
                    double z2, double tol) {
    // Split at the origin so every sub-box has the singular point at a
    // corner (or excludes it entirely; the same formula covers both via
    // signed differences of corner boxes).
    auto corner = [&](double a, double b, double c) {
        const double sgn = (a < 0 ? -1 : 1) * (b < 0 ? -1 : 1) * (c < 0 ? -1 : 1);
        return sgn * corner_box_inv_norm(std::abs(a), std::abs(b), std::abs(c), tol);
    };
    double s = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) {
                const double sg = ((i + j + k) % 2 == 0) ? -1.0 : 1.0;
                s += sg * corner(i ? x2 : x1, j ? y2 : y1, k ? z2 : z1);
            }
    return s;
}

double box_inv_norm_closed(double x1, double x2, double y1, double y2,
                           double z1, double z2) {
    auto anti = [](double x, double y, double z) {
        const double r = std::sqrt(x * x + y * y + z * z);
        double s = 0.0;
        if (y * z != 0.0) s += y * z * std::log(x + r);
        if (z * x != 0.0) s += z * x * std::log(y + r);
        if (x * y != 0.0) s += x * y * std::log(z + r);
        if (x != 0.0 && r > 0.0) s -= 0.5 * x * x * std::atan(y * z / (x * r));
        if (y != 0.0 && r > 0.0) s -= 0.5 * y * y * std::atan(z * x / (y * r));
        if (z != 0.0 && r > 0.0) s -= 0.5 * z * z * std::atan(x * y / (z * r));
        return s;
    };
    double s = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) {
                const double sg = ((i + j + k) % 2 == 0) ? -1.0 : 1.0;
                s += sg * anti(i ? x2 : x1, j ? y2 : y1, k ? z2 : z1);
            }
    return s;
}

}  // namespace oracles
