#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "sphkura/errors.hpp"
#include "sphkura/harmonics.hpp"
#include "sphkura/kernel.hpp"
#include "sphkura/quadrature.hpp"
#include "sphkura/sphere.hpp"

namespace sphkura {

/// Constants linking the nonlocal operator to the heat equation.
///
/// The nonlocal operator is normalized by 1/(c2 eps^2) with c2 = pi, the
/// exact cap area per unit eps. Its small-eps limit is D * Laplace-Beltrami
/// with D = M2 / (4 c2), where M2 = int_{R^2} |z|^2 K(|z|^2) dz.
struct ContinuumConstants {
    std::string kernel;
    double c2 = 0.0;
    double second_moment = 0.0;
    double kappa = 0.0;  ///< M2 / 4
    double d_effective = 0.0;  ///< M2 / (4 c2)
};

/// M2 = 2 pi int_0^1 r^3 K(r^2) dr by adaptive Simpson (tolerance 1e-10).
ContinuumConstants diffusion_constant(const Kernel& kernel);

/// Adaptive Simpson quadrature of f on [a, b] to absolute tolerance `tol`.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol);

/// Funk-Hecke multipliers of the zonal kernel y -> K(|x - y|^2 / eps):
/// mult[l] = 2 pi int_{-1}^{1} P_l(s) K((2 - 2s) / eps) ds for l <= max_degree.
std::vector<double> zonal_multipliers(const Kernel& kernel, double eps, int max_degree);

enum class Coupling { Sine, Identity };

/// The nonlocal operator
///   (A_J u)(x) = 1/(pi eps^2) int J(u(y) - u(x)) K(|x - y|^2 / eps) dsigma(y)
/// on a product grid, for J = sin or J = identity. Convolutions with the
/// zonal kernel are applied spectrally through zonal_multipliers; for J = sin
/// the integrand is split as cos u(x) (K * sin u) - sin u(x) (K * cos u).
class NonlocalOperator {
public:
    NonlocalOperator(std::shared_ptr<const QuadratureGrid> grid, double eps, const Kernel& kernel, int max_degree = -1);

    void apply(std::span<const double> u, Coupling coupling, std::span<double> out) const;
    std::vector<double> apply(std::span<const double> u, Coupling coupling) const;

    /// Eigenvalue of the linear operator on degree-l harmonics.
    double linear_eigenvalue(int l) const;
    /// Upper bound 2 k_0 / (pi eps^2) on |eigenvalue| of the linear operator.
    double spectral_radius() const noexcept { return spectral_radius_; }

    const SphericalTransform& transform() const noexcept { return transform_; }
    double eps() const noexcept { return eps_; }

private:
    void convolve(std::span<const double> values, std::span<double> out) const;

    SphericalTransform transform_;
    double eps_;
    double scale_;
    std::vector<double> multipliers_;
    std::vector<double> differences_;  // k_l - k_0, computed without cancellation
    double spectral_radius_ = 0.0;
};

/// Cap-centered product rule for pointwise evaluation: Gauss-Legendre in
/// cos(geodesic radius) over the cap, uniform in azimuth.
struct CapRule {
    std::size_t radial = 24;
    std::size_t azimuthal = 48;
};

/// Pointwise (1/(pi eps^2)) int (f(y) - f(x)) K(|x - y|^2 / eps) dsigma(y).
/// Throws std::invalid_argument if the cap rule has fewer than 50 nodes.
double nonlocal_apply(const std::function<double(const UnitVec3&)>& f, const UnitVec3& x, double eps,
                      const Kernel& kernel, const CapRule& rule = {});
double nonlocal_apply(const HarmonicField& f, const UnitVec3& x, double eps, const Kernel& kernel,
                      const CapRule& rule = {});
/// Grid data is first projected onto the harmonics the grid resolves.
double nonlocal_apply(const GridField& f, const UnitVec3& x, double eps, const Kernel& kernel,
                      const CapRule& rule = {});

struct OperatorConvergenceReport {
    std::vector<double> eps;
    std::vector<double> sup_errors;
    double d_effective = 0.0;
    /// Least-squares slope of log(error) against log(eps); NaN when any error
    /// is zero.
    double slope = 0.0;
    bool monotone_decreasing = false;
};

/// For each eps, sup over sample points of |nonlocal_apply(f) - D lap f|.
OperatorConvergenceReport operator_convergence_test(const HarmonicField& f, std::span<const double> eps_list,
                                                    const Kernel& kernel, std::span<const UnitVec3> sample_points,
                                                    const CapRule& rule = {});

/// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

struct IntegralSolveOptions {
    double dt = 0.0;  ///< 0 picks min(0.05, 1.25 / spectral radius)
    std::size_t sample_every = 1;
    int max_degree = -1;  ///< -1 uses the largest degree the grid resolves
};

/// Method-of-lines RK4 for du/dt = A_J u on the grid of u0, up to time T.
/// Returns the sampled fields (always including t = 0 and t = T).
std::vector<GridField> integral_equation_solve(const GridField& u0, double eps, const Kernel& kernel, double T,
                                               Coupling coupling, const IntegralSolveOptions& options = {});

}  // namespace sphkura
