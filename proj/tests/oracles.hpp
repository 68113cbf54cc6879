#pragma once

// Reference computations used as expected values in tests. None of them call
// into the solver code paths they check.

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <set>
#include <utility>
#include <vector>

#include "sphkura/sphere.hpp"

namespace oracle {

using Edge = std::pair<std::uint32_t, std::uint32_t>;

/// All ordered pairs i != j with |x_i - x_j|^2 < eps, by direct double loop
/// on the expanded form (x_i - x_j)^2 summed per coordinate.
inline std::set<Edge> brute_force_edges(const std::vector<sphkura::UnitVec3>& pts, double eps)
{
    std::set<Edge> edges;
    for (std::uint32_t i = 0; i < pts.size(); ++i) {
        for (std::uint32_t j = 0; j < pts.size(); ++j) {
            if (i == j) {
                continue;
            }
            const double dx = pts[i].x() - pts[j].x();
            const double dy = pts[i].y() - pts[j].y();
            const double dz = pts[i].z() - pts[j].z();
            if (dx * dx + dy * dy + dz * dz < eps) {
                edges.emplace(i, j);
            }
        }
    }
    return edges;
}

/// Phase difference of a symmetric two-node system, D' = -2a sin D, solved
/// by classical RK4 on the scalar equation with a very small step.
inline double two_node_difference(double d0, double a, double t, std::size_t steps = 200000)
{
    const double h = t / static_cast<double>(steps);
    double d = d0;
    const auto f = [a](double x) { return -2.0 * a * std::sin(x); };
    for (std::size_t k = 0; k < steps; ++k) {
        const double k1 = f(d);
        const double k2 = f(d + 0.5 * h * k1);
        const double k3 = f(d + 0.5 * h * k2);
        const double k4 = f(d + h * k3);
        d += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return d;
}

/// Closed form of the same equation: tan(D/2) = tan(D0/2) exp(-2at).
inline double two_node_difference_exact(double d0, double a, double t)
{
    return 2.0 * std::atan(std::tan(0.5 * d0) * std::exp(-2.0 * a * t));
}

/// Composite Simpson on [a, b] with m (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int m = 20000)
{
    const double h = (b - a) / m;
    double s = f(a) + f(b);
    for (int k = 1; k < m; ++k) {
        s += f(a + k * h) * (k % 2 ? 4.0 : 2.0);
    }
    return s * h / 3.0;
}

/// Eigenvalue of the linear nonlocal operator on degree-l harmonics:
/// (2 / eps^2) int_{1 - eps/2}^{1} (P_l(s) - 1) K((2 - 2s) / eps) ds,
/// with P_l from the standard library.
inline double nonlocal_eigenvalue(int l, double eps, const std::function<double(double)>& profile)
{
    const auto integrand = [&](double s) {
        return (std::legendre(static_cast<unsigned>(l), s) - 1.0) * profile((2.0 - 2.0 * s) / eps);
    };
    return 2.0 / (eps * eps) * simpson(integrand, 1.0 - eps / 2.0, 1.0);
}

/// Y_10 = sqrt(3 / 4pi) z and Y_20 = sqrt(5 / 16pi) (3z^2 - 1).
inline double y10(const sphkura::UnitVec3& p) { return std::sqrt(3.0 / (4.0 * std::numbers::pi)) * p.z(); }
inline double y20(const sphkura::UnitVec3& p)
{
    return std::sqrt(5.0 / (16.0 * std::numbers::pi)) * (3.0 * p.z() * p.z() - 1.0);
}

}  // namespace oracle
