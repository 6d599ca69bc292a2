#include "nlch/potential.hpp"

#include <cmath>
#include <stdexcept>

namespace nlch {

Potential Potential::logarithmic(double theta) {
    if (!(theta > 0.0))
        throw std::invalid_argument("Potential: theta must be positive");
    Potential p;
    p.kind_ = Kind::logarithmic;
    p.theta_ = theta;
    return p;
}

Potential Potential::regularized(double theta, double omega) {
    if (!(theta > 0.0))
        throw std::invalid_argument("Potential: theta must be positive");
    if (!(omega > 0.0 && omega < 1.0))
        throw std::invalid_argument("Potential: omega must lie in (0,1)");
    Potential p;
    p.kind_ = Kind::regularized;
    p.theta_ = theta;
    p.omega_ = omega;
    return p;
}

Potential Potential::double_well() {
    Potential p;
    p.kind_ = Kind::double_well;
    return p;
}

Potential Potential::quadratic() {
    Potential p;
    p.kind_ = Kind::quadratic;
    return p;
}

double Potential::eval_log(double s, int order) const {
    const double th = theta_;
    switch (order) {
        case 0: {
            // (1 +- s) log(1 +- s) extended by 0 at the endpoints.
            const double p = (s > -1.0) ? (1.0 + s) * std::log1p(s) : 0.0;
            const double q = (s < 1.0) ? (1.0 - s) * std::log1p(-s) : 0.0;
            return th / 2.0 * (p + q);
        }
        case 1:
            // log((1+s)/(1-s)) as log1p(s) - log1p(-s): stable near |s| = 1.
            if (std::abs(s) > 0.9)
                return th / 2.0 * (std::log1p(s) - std::log1p(-s));
            return th / 2.0 * std::log((1.0 + s) / (1.0 - s));
        case 2:
            return th / (1.0 - s * s);
        case 3: {
            const double d = 1.0 - s * s;
            return 2.0 * th * s / (d * d);
        }
        default:
            throw std::invalid_argument("Potential::eval: order must be 0..3");
    }
}

double Potential::eval(double s, int order) const {
    if (order < 0 || order > 3)
        throw std::invalid_argument("Potential::eval: order must be 0..3");
    switch (kind_) {
        case Kind::logarithmic:
            if (order == 0 ? std::abs(s) > 1.0 : std::abs(s) >= 1.0)
                throw std::domain_error("logarithmic potential: |s| out of range");
            return eval_log(s, order);
        case Kind::regularized: {
            const double cut = 1.0 - omega_;
            if (s > -cut && s < cut)
                return eval_log(s, order);
            const double s0 = (s >= cut) ? cut : -cut;
            const double d = s - s0;
            // Third-order Taylor extension about the cutoff point.
            switch (order) {
                case 0:
                    return eval_log(s0, 0) + eval_log(s0, 1) * d
                         + eval_log(s0, 2) * d * d / 2.0
                         + eval_log(s0, 3) * d * d * d / 6.0;
                case 1:
                    return eval_log(s0, 1) + eval_log(s0, 2) * d
                         + eval_log(s0, 3) * d * d / 2.0;
                case 2:
                    return eval_log(s0, 2) + eval_log(s0, 3) * d;
                default:
                    return eval_log(s0, 3);
            }
        }
        case Kind::double_well:
            switch (order) {
                case 0: return (s - 1.0) * (s - 1.0);
                case 1: return 2.0 * (s - 1.0);
                case 2: return 2.0;
                default: return 0.0;
            }
        case Kind::quadratic:
            switch (order) {
                case 0: return s * s / 2.0;
                case 1: return s;
                case 2: return 1.0;
                default: return 0.0;
            }
    }
    throw std::logic_error("Potential: unknown kind");
}

Eigen::VectorXd Potential::eval(const Eigen::VectorXd& s, int order) const {
    Eigen::VectorXd out(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i)
        out(i) = eval(s(i), order);
    return out;
}

}  // namespace nlch
