#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "sphkura/quadrature.hpp"
#include "sphkura/sphere.hpp"

namespace sphkura {

/// Real spherical-harmonic expansion sum a_lm Y_lm truncated at degree L.
struct HarmonicField {
    int max_degree = 0;
    std::vector<double> coeffs;

    HarmonicField() : coeffs(1, 0.0) {}
    explicit HarmonicField(int degree) : max_degree(degree), coeffs(harmonic_count(degree), 0.0) {}

    double& operator()(int l, int m) { return coeffs.at(harmonic_index(l, m)); }
    double operator()(int l, int m) const { return coeffs.at(harmonic_index(l, m)); }

    double evaluate(const UnitVec3& p) const;
    /// Field with coefficients multiplied by -l(l+1).
    HarmonicField laplacian() const;
};

/// Field on a quadrature grid at time t.
struct GridField {
    std::shared_ptr<const QuadratureGrid> grid;
    std::vector<double> values;
    double t = 0.0;
};

/// Forward and inverse real harmonic transform on a fixed product grid.
/// Precomputes Legendre values per ring and longitude trig tables.
class SphericalTransform {
public:
    /// Emits a warning on stderr when the grid does not resolve max_degree
    /// (unless disabled); the transform still runs but projection is no
    /// longer exact. Evaluation is exact on any grid.
    SphericalTransform(std::shared_ptr<const QuadratureGrid> grid, int max_degree, bool warn_unresolved = true);

    const QuadratureGrid& grid() const noexcept { return *grid_; }
    const std::shared_ptr<const QuadratureGrid>& grid_ptr() const noexcept { return grid_; }
    int max_degree() const noexcept { return max_degree_; }

    /// a_lm = sum_nodes w f Y_lm.
    HarmonicField project(std::span<const double> values) const;
    HarmonicField project(const std::function<double(const UnitVec3&)>& f) const;

    void evaluate(const HarmonicField& field, std::span<double> out) const;
    std::vector<double> evaluate(const HarmonicField& field) const;

private:
    std::shared_ptr<const QuadratureGrid> grid_;
    int max_degree_;
    std::size_t legendre_stride_;
    std::vector<double> legendre_;  // [ring][harmonic_index(l, m >= 0)]
    std::vector<double> cos_table_; // [m][column], includes the sqrt(2) factor for m > 0
    std::vector<double> sin_table_;
};

/// Projection of f onto degrees <= max_degree using `grid`.
HarmonicField project(const std::function<double(const UnitVec3&)>& f,
                      std::shared_ptr<const QuadratureGrid> grid, int max_degree);
HarmonicField project(const GridField& f, int max_degree);
GridField evaluate(const HarmonicField& h, std::shared_ptr<const QuadratureGrid> grid);

/// Exact spectral heat flow: a_lm(t) = a_lm(0) exp(-D l(l+1) t).
HarmonicField heat_solve(const HarmonicField& h0, double diffusivity, double t);

/// Surface average a_00 / sqrt(4 pi).
double mean_value(const HarmonicField& h);

/// Largest |value| over the nodes of `grid`.
double sup_norm_on(const HarmonicField& h, const QuadratureGrid& grid);

}  // namespace sphkura
