#include "nlch/kernel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace nlch {

namespace {
constexpr double pi = std::numbers::pi;
std::atomic<std::uint64_t> g_eval_count{0};
}  // namespace

Kernel Kernel::newtonian2d(double eta) { return Kernel{Kind::newtonian2d, eta}; }
Kernel Kernel::newtonian3d(double eta) { return Kernel{Kind::newtonian3d, eta}; }

Kernel Kernel::newtonian3d_reg(double sigma, double eta) {
    if (!(sigma > 0.0))
        throw std::invalid_argument("Kernel: sigma must be positive");
    Kernel k{Kind::newtonian3d_reg, eta};
    k.sigma = sigma;
    return k;
}

Kernel Kernel::mollifier(double a, double eta) {
    if (!(a > 0.0))
        throw std::invalid_argument("Kernel: mollifier radius must be positive");
    Kernel k{Kind::mollifier, eta};
    k.a = a;
    return k;
}

double Kernel::eval(const double* x, int dim) const {
    g_eval_count.fetch_add(1, std::memory_order_relaxed);
    double r2 = 0.0;
    for (int i = 0; i < dim; ++i)
        r2 += x[i] * x[i];
    switch (kind) {
        case Kind::newtonian2d:
            if (r2 == 0.0)
                throw std::domain_error("newtonian2d kernel evaluated at 0");
            return eta / (4.0 * pi) * std::log(r2);
        case Kind::newtonian3d:
            if (r2 == 0.0)
                throw std::domain_error("newtonian3d kernel evaluated at 0");
            return -eta / (4.0 * pi * std::sqrt(r2));
        case Kind::newtonian3d_reg:
            return -eta / (4.0 * pi * std::max(sigma, std::sqrt(r2)));
        case Kind::mollifier: {
            const double s2 = r2 / (a * a);
            if (s2 >= 1.0)
                return 0.0;
            return eta / (a * a) * std::exp(-1.0 / (1.0 - s2));
        }
        case Kind::composite:
            throw std::logic_error("composite kernels are operator-level mixtures");
    }
    throw std::logic_error("Kernel: unknown kind");
}

std::string Kernel::id() const {
    switch (kind) {
        case Kind::newtonian2d: return "newt2d";
        case Kind::newtonian3d: return "newt3d";
        case Kind::newtonian3d_reg: return "newt3d-reg";
        case Kind::mollifier: return "moll";
        case Kind::composite: return "mix";
    }
    return "?";
}

std::uint64_t Kernel::eval_count() { return g_eval_count.load(); }
void Kernel::reset_eval_count() { g_eval_count.store(0); }

}  // namespace nlch
