#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "sphkura/sphere.hpp"

namespace sphkura {

struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1], nodes ascending.
GaussRule gauss_legendre(std::size_t n);

/// Gauss-Legendre rule mapped to [a, b].
GaussRule gauss_legendre(std::size_t n, double a, double b);

/// Product rule on S^2: Gauss-Legendre in cos(theta) times uniform longitude.
/// Node (ring k, column j) sits at index k * n_phi + j; rings run from the
/// south pole (cos theta = -1) northwards.
class QuadratureGrid {
public:
    QuadratureGrid(std::size_t n_theta, std::size_t n_phi);

    std::size_t n_theta() const noexcept { return n_theta_; }
    std::size_t n_phi() const noexcept { return n_phi_; }
    std::size_t size() const noexcept { return nodes_.size(); }

    const std::vector<UnitVec3>& nodes() const noexcept { return nodes_; }
    const std::vector<double>& weights() const noexcept { return weights_; }
    const std::vector<double>& ring_cos_theta() const noexcept { return ring_cos_; }
    /// Gauss weight of each ring (sums to 2).
    const std::vector<double>& ring_weights() const noexcept { return ring_weights_; }
    double phi(std::size_t column) const noexcept;

    /// Whether the rule integrates products of degree-L harmonics exactly:
    /// n_theta >= L + 1 and n_phi >= 2L + 1.
    bool resolves(int max_degree) const noexcept;

    /// Largest degree this grid resolves.
    int max_resolved_degree() const noexcept;

    double integrate(std::span<const double> values) const;
    double integrate(const std::function<double(const UnitVec3&)>& f) const;

    /// Samples f at every node.
    std::vector<double> sample(const std::function<double(const UnitVec3&)>& f) const;

private:
    std::size_t n_theta_;
    std::size_t n_phi_;
    std::vector<double> ring_cos_;
    std::vector<double> ring_weights_;
    std::vector<UnitVec3> nodes_;
    std::vector<double> weights_;
};

QuadratureGrid make_grid(std::size_t n_theta, std::size_t n_phi);

}  // namespace sphkura
