#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>

namespace psido {

using cplx = std::complex<double>;

using Point = Eigen::VectorXd;          // phase-space point, basis (x_1..x_n, xi_1..xi_n)
using Vec2 = Eigen::Vector2d;           // n = 1 phase-space point
using RealMatrix = Eigen::MatrixXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr cplx I{0.0, 1.0};

inline Point point2(double x, double xi)
{
    Point p(2);
    p << x, xi;
    return p;
}

/// <X> = (1 + |X|^2)^{1/2}
inline double japanese(double x, double xi) { return std::sqrt(1.0 + x * x + xi * xi); }

inline bool is_power_of_two(std::int64_t n) { return n > 0 && (n & (n - 1)) == 0; }

} // namespace psido
