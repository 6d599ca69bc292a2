#pragma once

#include <complex>

namespace nlch {

/// Cutoff radius for the near-field box B_inf(x; eps). The square closed
/// forms require eps <= 1/2, the disc forms eps < 1; the factories validate
/// the corresponding range.
struct EpsNeighborhood {
    double epsilon;
    static EpsNeighborhood square(double eps);
    static EpsNeighborhood disc(double eps);
};

/// Exact convolution of the 2D Newtonian kernel (1/2pi) log ||u|| against
/// the indicator of [0,x1] x [0,x2]. Continuous, symmetric, nonpositive;
/// exactly zero on the coordinate cross. Throws outside [0,1]^2.
double I_square(double x1, double x2);

/// Same antiderivative without the [0,1]^2 domain check; valid for any
/// x1, x2 >= 0. Used for scaled near-field boxes on mapped rectangles.
double I_quadrant(double x1, double x2);

/// K * 1_square over the whole unit square, assembled from four I values
/// (boundary branch reduces to two terms).
double J_square(double x1, double x2);

/// Near-field correction G_eps(x) = integral of K over x - (square cap
/// B_inf(x;eps)), via entrywise-min reduction to I. Requires eps in (0,1/2].
double G_eps_square(double x1, double x2, double eps);
double G_eps_square(double x1, double x2, EpsNeighborhood nb);

/// Location of the argmin of I on the diagonal: s = (sqrt2/2) exp(1 - pi/4).
double I_square_argmin_coordinate();

/// Principal-branch dilogarithm. Series for small |z|, functional equations
/// elsewhere. Throws on non-finite input.
std::complex<double> dilog(std::complex<double> z);

/// Disc closed forms: J(x) = (||x||^2 - 1)/4 on the closed unit disc.
double J_disc(double x1, double x2);

/// Near-field correction on the disc. Interior branch eps^2(log eps^2 - 1)/4
/// for ||x|| <= 1-eps; dilogarithm branch otherwise. Requires ||x|| <= 1 and
/// eps in (0,1).
double G_eps_disc(double x1, double x2, double eps);
double G_eps_disc(double x1, double x2, EpsNeighborhood nb);

}  // namespace nlch
