#pragma once

#include "nlch/conv_operator.hpp"
#include "nlch/grid.hpp"

#include <map>
#include <memory>
#include <random>

namespace testing {

inline std::mt19937& rng() {
    static std::mt19937 gen(20250811);
    return gen;
}

inline double uniform(double a, double b) {
    std::uniform_real_distribution<double> d(a, b);
    return d(rng());
}

/// Shared square grids, built once per process.
inline std::shared_ptr<const nlch::Grid2D> square_grid(int n) {
    static std::map<int, std::shared_ptr<const nlch::Grid2D>> cache;
    auto it = cache.find(n);
    if (it == cache.end()) {
        auto g = std::make_shared<nlch::Grid2D>(
            nlch::tensor_grid(nlch::cheb_grid(n, 0.0, 1.0), nlch::cheb_grid(n, 0.0, 1.0)));
        it = cache.emplace(n, std::move(g)).first;
    }
    return it->second;
}

/// Shared corrected unit-eta Newtonian operator at the desk configuration.
inline std::shared_ptr<const nlch::ConvOperator> newtonian_op(int n, double eps = 1e-5,
                                                              double alpha = 4.0) {
    static std::map<std::tuple<int, double, double>, std::shared_ptr<const nlch::ConvOperator>> cache;
    const auto key = std::make_tuple(n, eps, alpha);
    auto it = cache.find(key);
    if (it == cache.end()) {
        auto op = std::make_shared<nlch::ConvOperator>(
            nlch::assemble_operator(square_grid(n), nlch::Kernel::newtonian2d(1.0), eps, alpha,
                                    nlch::Partition::Mode::maximal, true));
        it = cache.emplace(key, std::move(op)).first;
    }
    return it->second;
}

/// Scaled copy eta * base of the cached unit operator.
inline std::shared_ptr<nlch::ConvOperator> scaled_newtonian(int n, double eta,
                                                            double eps = 1e-5,
                                                            double alpha = 4.0) {
    auto base = newtonian_op(n, eps, alpha);
    auto op = std::make_shared<nlch::ConvOperator>(*base);
    op->matrix *= eta;
    op->meta.eta = eta;
    return op;
}

}  // namespace testing
