#pragma once

#include <Eigen/Dense>

namespace nlch {

/// Free-energy density F with derivatives up to third order.
///
/// logarithmic:  F(s) = (theta/2)[(1+s)log(1+s) + (1-s)log(1-s)], |s| <= 1.
/// regularized:  logarithmic on (-1+omega, 1-omega), extended outside by its
///               third-order Taylor polynomials at the cutoff points (C^3).
/// double_well:  F(s) = (s-1)^2.
/// quadratic:    F(s) = s^2/2, so that F'(s) = s (pure-diffusion checks).
class Potential {
public:
    enum class Kind { logarithmic, regularized, double_well, quadratic };

    static Potential logarithmic(double theta);
    static Potential regularized(double theta, double omega);  // omega in (0,1)
    static Potential double_well();
    static Potential quadratic();

    /// Derivative of order 0..3 at s. Logarithmic kind throws
    /// std::domain_error for |s| > 1 (order 0) or |s| >= 1 (order >= 1).
    double eval(double s, int order) const;

    Eigen::VectorXd eval(const Eigen::VectorXd& s, int order) const;

    Kind kind() const { return kind_; }
    double theta() const { return theta_; }
    double omega() const { return omega_; }

    /// True when every eval order is defined for all real s.
    bool globally_defined() const { return kind_ != Kind::logarithmic; }

private:
    Kind kind_ = Kind::logarithmic;
    double theta_ = 2.0;
    double omega_ = 0.0;

    double eval_log(double s, int order) const;
};

}  // namespace nlch
