#pragma once

#include <Eigen/Dense>
#include <atomic>
#include <cstdint>
#include <string>
#include <vector>

namespace nlch {

/// Interaction-kernel catalogue. 2D Newtonian (1/2pi) log ||x||, 3D Newtonian
/// -1/(4pi ||x||) and its clamped regularization, the compactly supported
/// mollifier H_a(x) = a^-2 exp(-(1-||x/a||^2)^-1) 1_{||x||<a}, and composite
/// mixtures of prebuilt operators. All kinds carry the scalar scale eta.
struct Kernel {
    enum class Kind { newtonian2d, newtonian3d, newtonian3d_reg, mollifier, composite };

    Kind kind = Kind::newtonian2d;
    double eta = 1.0;
    double sigma = 0.0;  // newtonian3d_reg clamp radius
    double a = 0.1;      // mollifier support radius

    static Kernel newtonian2d(double eta = 1.0);
    static Kernel newtonian3d(double eta = 1.0);
    static Kernel newtonian3d_reg(double sigma, double eta = 1.0);
    static Kernel mollifier(double a, double eta = 1.0);

    /// Pointwise value at displacement x (2 or 3 components per kind),
    /// including the eta scaling. Throws std::domain_error at x = 0 for the
    /// unregularized Newtonian kinds; callers must use the correction path.
    double eval(const double* x, int dim) const;

    double eval2(double x1, double x2) const { double v[2] = {x1, x2}; return eval(v, 2); }
    double eval3(double x1, double x2, double x3) const {
        double v[3] = {x1, x2, x3};
        return eval(v, 3);
    }

    bool singular() const {
        return kind == Kind::newtonian2d || kind == Kind::newtonian3d;
    }

    /// Cache-format id string: "newt2d", "newt3d", "newt3d-reg", "moll", "mix".
    std::string id() const;

    /// Process-wide count of pointwise kernel evaluations. Used to verify
    /// that warm operator caches perform no kernel work.
    static std::uint64_t eval_count();
    static void reset_eval_count();
};

}  // namespace nlch
