#include "nlch/closed_forms.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace nlch {

namespace {
constexpr double pi = std::numbers::pi;

double clamp_unit(double v) { return v < -1.0 ? -1.0 : (v > 1.0 ? 1.0 : v); }
}  // namespace

EpsNeighborhood EpsNeighborhood::square(double eps) {
    if (!(eps > 0.0 && eps <= 0.5))
        throw std::invalid_argument("EpsNeighborhood::square: eps outside (0, 1/2]");
    return {eps};
}

EpsNeighborhood EpsNeighborhood::disc(double eps) {
    if (!(eps > 0.0 && eps < 1.0))
        throw std::invalid_argument("EpsNeighborhood::disc: eps outside (0, 1)");
    return {eps};
}

double G_eps_square(double x1, double x2, EpsNeighborhood nb) {
    return G_eps_square(x1, x2, nb.epsilon);
}

double G_eps_disc(double x1, double x2, EpsNeighborhood nb) {
    return G_eps_disc(x1, x2, nb.epsilon);
}

double I_quadrant(double x1, double x2) {
    // Removable singularity: the integral vanishes whenever a side collapses.
    if (x1 == 0.0 || x2 == 0.0)
        return 0.0;
    const double r2 = x1 * x1 + x2 * x2;
    const double d = x2 * x2 - x1 * x1;
    return x1 * x2 / (4.0 * pi) * (std::log(r2) - 3.0)
         + r2 / 16.0
         - d / (8.0 * pi) * std::atan2(d, 2.0 * x1 * x2);
}

double I_square(double x1, double x2) {
    if (!(x1 >= 0.0 && x1 <= 1.0 && x2 >= 0.0 && x2 <= 1.0))
        throw std::invalid_argument("I_square: point outside [0,1]^2");
    return I_quadrant(x1, x2);
}

double J_square(double x1, double x2) {
    if (!(x1 >= 0.0 && x1 <= 1.0 && x2 >= 0.0 && x2 <= 1.0))
        throw std::invalid_argument("J_square: point outside [0,1]^2");
    const bool on_bnd1 = (x1 == 0.0 || x1 == 1.0);
    const bool on_bnd2 = (x2 == 0.0 || x2 == 1.0);
    if (on_bnd1 || on_bnd2) {
        const double s = on_bnd1 ? (on_bnd2 ? 0.0 : x2) : x1;
        return I_quadrant(1.0, s) + I_quadrant(1.0, 1.0 - s);
    }
    return I_quadrant(x1, x2) + I_quadrant(1.0 - x1, x2)
         + I_quadrant(x1, 1.0 - x2) + I_quadrant(1.0 - x1, 1.0 - x2);
}

double G_eps_square(double x1, double x2, double eps) {
    if (!(eps > 0.0 && eps <= 0.5))
        throw std::invalid_argument("G_eps_square: eps outside (0, 1/2]");
    if (!(x1 >= 0.0 && x1 <= 1.0 && x2 >= 0.0 && x2 <= 1.0))
        throw std::invalid_argument("G_eps_square: point outside [0,1]^2");
    const double a1 = std::min(x1, eps), b1 = std::min(1.0 - x1, eps);
    const double a2 = std::min(x2, eps), b2 = std::min(1.0 - x2, eps);
    return I_quadrant(a1, a2) + I_quadrant(b1, a2)
         + I_quadrant(a1, b2) + I_quadrant(b1, b2);
}

double I_square_argmin_coordinate() {
    return std::numbers::sqrt2 / 2.0 * std::exp(1.0 - pi / 4.0);
}

std::complex<double> dilog(std::complex<double> z) {
    using C = std::complex<double>;
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw std::invalid_argument("dilog: non-finite argument");
    if (z == C(0.0, 0.0))
        return C(0.0, 0.0);
    if (z == C(1.0, 0.0))
        return C(pi * pi / 6.0, 0.0);

    // Inversion onto |z| <= 1: Li2(z) = -Li2(1/z) - pi^2/6 - log^2(-z)/2.
    if (std::abs(z) > 1.0) {
        const C lg = std::log(-z);
        return -dilog(1.0 / z) - pi * pi / 6.0 - 0.5 * lg * lg;
    }
    // Reflection near z = 1: Li2(z) = pi^2/6 - log(z)log(1-z) - Li2(1-z).
    if (std::abs(1.0 - z) < 0.5)
        return pi * pi / 6.0 - std::log(z) * std::log(1.0 - z) - dilog(1.0 - z);

    if (std::abs(z) <= 0.5) {
        // Direct series sum_k z^k / k^2.
        C term = z, sum = z;
        for (int k = 2; k < 60; ++k) {
            term *= z;
            const C add = term / double(k * k);
            sum += add;
            if (std::abs(add) < 1e-18 * (1.0 + std::abs(sum)))
                break;
        }
        return sum;
    }
    // Remaining annulus: Bernoulli series in u = -log(1-z),
    // Li2(z) = sum_k B_k u^{k+1}/(k+1)!. Converges for |u| < 2 pi.
    static const double bern[] = {
        1.0, -0.5, 1.0 / 6, 0.0, -1.0 / 30, 0.0, 1.0 / 42, 0.0, -1.0 / 30,
        0.0, 5.0 / 66, 0.0, -691.0 / 2730, 0.0, 7.0 / 6, 0.0, -3617.0 / 510,
        0.0, 43867.0 / 798, 0.0, -174611.0 / 330, 0.0, 854513.0 / 138,
        0.0, -236364091.0 / 2730, 0.0, 8553103.0 / 6};
    const C u = -std::log(1.0 - z);
    C upow = u, sum(0.0, 0.0);
    double fact = 1.0;
    for (int k = 0; k < 27; ++k) {
        fact *= (k + 1);
        if (bern[k] != 0.0)
            sum += bern[k] * upow / fact;
        upow *= u;
        if (k > 3 && bern[k] != 0.0 && std::abs(upow * bern[k]) / fact < 1e-18)
            break;
    }
    return sum;
}

double J_disc(double x1, double x2) {
    const double r2 = x1 * x1 + x2 * x2;
    if (r2 > 1.0 + 1e-14)
        throw std::invalid_argument("J_disc: point outside the unit disc");
    return (std::min(r2, 1.0) - 1.0) / 4.0;
}

double G_eps_disc(double x1, double x2, double eps) {
    if (!(eps > 0.0 && eps < 1.0))
        throw std::invalid_argument("G_eps_disc: eps outside (0,1)");
    const double a = std::hypot(x1, x2);
    if (a > 1.0 + 1e-14)
        throw std::invalid_argument("G_eps_disc: point outside the unit disc");
    const double full = eps * eps * (std::log(eps * eps) - 1.0);
    if (a <= 1.0 - eps)
        return 0.25 * full;

    // Boundary branch: the near-field lens B(0;eps) cap B(x;1) loses a cap.
    // Angle arguments clamped into [-1,1] to absorb 1-ulp overflow at seams.
    const double theta = std::acos(clamp_unit((1.0 - a * a - eps * eps) / (2.0 * a * eps)));
    const double L = (eps * eps - 1.0 - a * a) / (2.0 * a);
    const double phi = 0.5 * std::acos(clamp_unit(L));
    const double s2p = std::sin(2.0 * phi), c2p = std::cos(2.0 * phi);
    const double im = dilog(std::complex<double>(-a * c2p, -a * s2p)).imag();
    const double h = 2.0 / pi
                       * (im
                          + (1.0 - a * a) * (phi - 0.5 * std::atan2(a * s2p, 1.0 + a * c2p))
                          + a * (1.0 - std::log(eps)) * s2p)
                   - (1.0 - a * a);
    return 0.25 * ((pi - theta) / pi * full + h);
}

}  // namespace nlch
