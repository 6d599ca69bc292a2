#pragma once

#include "nlch/conv_operator.hpp"
#include "nlch/grid.hpp"

#include <string>

namespace nlch {

/// Periodic wave sin(2 pi x1) cos(2 pi x2); zero mean.
Eigen::VectorXd ic_wave(const Grid2D& grid);

Eigen::VectorXd ic_constant(const Grid2D& grid, double c);

/// The compactly supported seed (1/2 sin(3 pi x1) cos(3 pi x2) + 1/4)
/// restricted to B_inf((1/2,1/2); 9/25).
double compact_seed(double x1, double x2);

/// Mollified compact initial condition 3 H_a * q via the discrete mollifier
/// convolution operator (direct quadrature). Quadrature mean is about 0.18
/// for a = 0.1.
Eigen::VectorXd ic_compact(const Grid2D& grid, const ConvOperator& mollifier_op);
Eigen::VectorXd ic_compact(std::shared_ptr<const Grid2D> grid, double a = 0.1);

/// Flat little-endian f64 field files (same conventions as the operator
/// cache payload).
Eigen::VectorXd read_field(const std::string& path, int expected_size);
void write_field(const std::string& path, const Eigen::VectorXd& field);

}  // namespace nlch
