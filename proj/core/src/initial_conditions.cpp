#include "nlch/initial_conditions.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

namespace nlch {

namespace {
constexpr double pi = std::numbers::pi;
}

Eigen::VectorXd ic_wave(const Grid2D& grid) {
    Eigen::VectorXd rho(grid.m());
    for (int i = 0; i < grid.m(); ++i)
        rho(i) = std::sin(2.0 * pi * grid.points(i, 0)) * std::cos(2.0 * pi * grid.points(i, 1));
    return rho;
}

Eigen::VectorXd ic_constant(const Grid2D& grid, double c) {
    return Eigen::VectorXd::Constant(grid.m(), c);
}

double compact_seed(double x1, double x2) {
    if (std::max(std::abs(x1 - 0.5), std::abs(x2 - 0.5)) > 9.0 / 25.0)
        return 0.0;
    return 0.5 * std::sin(3.0 * pi * x1) * std::cos(3.0 * pi * x2) + 0.25;
}

Eigen::VectorXd ic_compact(const Grid2D& grid, const ConvOperator& mollifier_op) {
    Eigen::VectorXd q(grid.m());
    for (int i = 0; i < grid.m(); ++i)
        q(i) = compact_seed(grid.points(i, 0), grid.points(i, 1));
    return 3.0 * (mollifier_op.matrix * q);
}

Eigen::VectorXd ic_compact(std::shared_ptr<const Grid2D> grid, double a) {
    const ConvOperator h = assemble_direct_2d(grid, Kernel::mollifier(a));
    return ic_compact(*grid, h);
}

Eigen::VectorXd read_field(const std::string& path, int expected_size) {
    std::ifstream is(path, std::ios::binary | std::ios::ate);
    if (!is)
        throw FormatError("read_field: cannot open " + path);
    const auto bytes = static_cast<std::uint64_t>(is.tellg());
    if (bytes != static_cast<std::uint64_t>(expected_size) * 8)
        throw FormatError("read_field: " + path + " does not hold the expected grid size");
    is.seekg(0);
    Eigen::VectorXd v(expected_size);
    is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(bytes));
    if (!is)
        throw FormatError("read_field: truncated read from " + path);
    return v;
}

void write_field(const std::string& path, const Eigen::VectorXd& field) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os)
        throw FormatError("write_field: cannot open " + path);
    os.write(reinterpret_cast<const char*>(field.data()),
             static_cast<std::streamsize>(field.size() * 8));
}

}  // namespace nlch
