#include "sphkura/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sphkura {

GaussRule gauss_legendre(std::size_t n)
{
    if (n == 0) {
        throw std::invalid_argument("gauss_legendre: need at least one node");
    }
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const std::size_t half = (n + 1) / 2;
    for (std::size_t i = 0; i < half; ++i) {
        // Tricomi initial guess for the i-th largest root, then Newton.
        double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
        double dp = 1.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (std::size_t k = 2; k <= n; ++k) {
                const double kk = static_cast<double>(k);
                const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
                p0 = p1;
                p1 = p2;
            }
            dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
            const double step = p1 / dp;
            x -= step;
            if (std::abs(step) < 1e-16) {
                break;
            }
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[n - 1 - i] = x;
        rule.nodes[i] = -x;
        rule.weights[n - 1 - i] = w;
        rule.weights[i] = w;
    }
    return rule;
}

GaussRule gauss_legendre(std::size_t n, double a, double b)
{
    GaussRule rule = gauss_legendre(n);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    for (std::size_t i = 0; i < n; ++i) {
        rule.nodes[i] = mid + half * rule.nodes[i];
        rule.weights[i] *= half;
    }
    return rule;
}

QuadratureGrid::QuadratureGrid(std::size_t n_theta, std::size_t n_phi)
    : n_theta_(n_theta), n_phi_(n_phi)
{
    if (n_theta < 2 || n_phi < 4) {
        throw std::invalid_argument("quadrature grid needs n_theta >= 2 and n_phi >= 4, got " +
                                    std::to_string(n_theta) + "x" + std::to_string(n_phi));
    }
    const GaussRule rule = gauss_legendre(n_theta);
    ring_cos_ = rule.nodes;
    ring_weights_ = rule.weights;
    const double dphi = 2.0 * std::numbers::pi / static_cast<double>(n_phi);
    nodes_.reserve(n_theta * n_phi);
    weights_.reserve(n_theta * n_phi);
    for (std::size_t k = 0; k < n_theta; ++k) {
        const double theta = std::acos(ring_cos_[k]);
        for (std::size_t j = 0; j < n_phi; ++j) {
            nodes_.push_back(UnitVec3::from_spherical(theta, phi(j)));
            weights_.push_back(ring_weights_[k] * dphi);
        }
    }
}

double QuadratureGrid::phi(std::size_t column) const noexcept
{
    return 2.0 * std::numbers::pi * static_cast<double>(column) / static_cast<double>(n_phi_);
}

bool QuadratureGrid::resolves(int max_degree) const noexcept
{
    return max_degree >= 0 && n_theta_ >= static_cast<std::size_t>(max_degree) + 1 &&
           n_phi_ >= 2 * static_cast<std::size_t>(max_degree) + 1;
}

int QuadratureGrid::max_resolved_degree() const noexcept
{
    const auto by_theta = static_cast<long long>(n_theta_) - 1;
    const auto by_phi = (static_cast<long long>(n_phi_) - 1) / 2;
    return static_cast<int>(std::min(by_theta, by_phi));
}

double QuadratureGrid::integrate(std::span<const double> values) const
{
    if (values.size() != size()) {
        throw std::invalid_argument("QuadratureGrid::integrate: value count does not match node count");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        total += weights_[i] * values[i];
    }
    return total;
}

double QuadratureGrid::integrate(const std::function<double(const UnitVec3&)>& f) const
{
    return integrate(sample(f));
}

std::vector<double> QuadratureGrid::sample(const std::function<double(const UnitVec3&)>& f) const
{
    std::vector<double> out(size());
    for (std::size_t i = 0; i < size(); ++i) {
        out[i] = f(nodes_[i]);
    }
    return out;
}

QuadratureGrid make_grid(std::size_t n_theta, std::size_t n_phi)
{
    return QuadratureGrid(n_theta, n_phi);
}

}  // namespace sphkura
