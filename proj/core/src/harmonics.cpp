#include "sphkura/harmonics.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>
#include <stdexcept>

namespace sphkura {

double HarmonicField::evaluate(const UnitVec3& p) const
{
    std::vector<double> ylm(harmonic_count(max_degree));
    real_spherical_harmonics(max_degree, p, ylm);
    double total = 0.0;
    for (std::size_t i = 0; i < ylm.size(); ++i) {
        total += coeffs[i] * ylm[i];
    }
    return total;
}

HarmonicField HarmonicField::laplacian() const
{
    HarmonicField out = *this;
    for (int l = 0; l <= max_degree; ++l) {
        for (int m = -l; m <= l; ++m) {
            out(l, m) *= -static_cast<double>(l * (l + 1));
        }
    }
    return out;
}

SphericalTransform::SphericalTransform(std::shared_ptr<const QuadratureGrid> grid, int max_degree, bool warn_unresolved)
    : grid_(std::move(grid)), max_degree_(max_degree), legendre_stride_(harmonic_count(max_degree))
{
    if (!grid_) {
        throw std::invalid_argument("SphericalTransform: null grid");
    }
    if (max_degree < 0) {
        throw std::invalid_argument("SphericalTransform: negative degree");
    }
    if (warn_unresolved && !grid_->resolves(max_degree)) {
        std::cerr << "warning: " << grid_->n_theta() << "x" << grid_->n_phi()
                  << " grid does not resolve degree " << max_degree << "; projection is approximate\n";
    }
    const std::size_t rings = grid_->n_theta();
    const std::size_t cols = grid_->n_phi();
    legendre_.assign(rings * legendre_stride_, 0.0);
    for (std::size_t k = 0; k < rings; ++k) {
        normalized_legendre(max_degree, grid_->ring_cos_theta()[k],
                            std::span<double>(legendre_.data() + k * legendre_stride_, legendre_stride_));
    }
    const auto m_count = static_cast<std::size_t>(max_degree) + 1;
    cos_table_.resize(m_count * cols);
    sin_table_.resize(m_count * cols);
    for (std::size_t m = 0; m < m_count; ++m) {
        const double scale = m == 0 ? 1.0 : std::numbers::sqrt2;
        for (std::size_t j = 0; j < cols; ++j) {
            const double angle = 2.0 * std::numbers::pi * static_cast<double>((m * j) % cols) / static_cast<double>(cols);
            cos_table_[m * cols + j] = scale * std::cos(angle);
            sin_table_[m * cols + j] = m == 0 ? 0.0 : scale * std::sin(angle);
        }
    }
}

HarmonicField SphericalTransform::project(std::span<const double> values) const
{
    const std::size_t rings = grid_->n_theta();
    const std::size_t cols = grid_->n_phi();
    if (values.size() != rings * cols) {
        throw std::invalid_argument("SphericalTransform::project: value count does not match grid");
    }
    const int L = max_degree_;
    HarmonicField out(L);
    const double dphi = 2.0 * std::numbers::pi / static_cast<double>(cols);
    std::vector<double> fc(static_cast<std::size_t>(L) + 1);
    std::vector<double> fs(static_cast<std::size_t>(L) + 1);
    for (std::size_t k = 0; k < rings; ++k) {
        const double* row = values.data() + k * cols;
        for (int m = 0; m <= L; ++m) {
            const double* ct = cos_table_.data() + static_cast<std::size_t>(m) * cols;
            const double* st = sin_table_.data() + static_cast<std::size_t>(m) * cols;
            double c = 0.0;
            double s = 0.0;
            for (std::size_t j = 0; j < cols; ++j) {
                c += row[j] * ct[j];
                s += row[j] * st[j];
            }
            fc[static_cast<std::size_t>(m)] = c;
            fs[static_cast<std::size_t>(m)] = s;
        }
        const double w = grid_->ring_weights()[k] * dphi;
        const double* plm = legendre_.data() + k * legendre_stride_;
        for (int l = 0; l <= L; ++l) {
            for (int m = 0; m <= l; ++m) {
                const double p = w * plm[harmonic_index(l, m)];
                out.coeffs[harmonic_index(l, m)] += p * fc[static_cast<std::size_t>(m)];
                if (m > 0) {
                    out.coeffs[harmonic_index(l, -m)] += p * fs[static_cast<std::size_t>(m)];
                }
            }
        }
    }
    return out;
}

HarmonicField SphericalTransform::project(const std::function<double(const UnitVec3&)>& f) const
{
    return project(grid_->sample(f));
}

void SphericalTransform::evaluate(const HarmonicField& field, std::span<double> out) const
{
    const std::size_t rings = grid_->n_theta();
    const std::size_t cols = grid_->n_phi();
    if (out.size() != rings * cols) {
        throw std::invalid_argument("SphericalTransform::evaluate: output size does not match grid");
    }
    const int L = std::min(field.max_degree, max_degree_);
    std::vector<double> gc(static_cast<std::size_t>(L) + 1);
    std::vector<double> gs(static_cast<std::size_t>(L) + 1);
    for (std::size_t k = 0; k < rings; ++k) {
        const double* plm = legendre_.data() + k * legendre_stride_;
        for (int m = 0; m <= L; ++m) {
            double c = 0.0;
            double s = 0.0;
            for (int l = m; l <= L; ++l) {
                const double p = plm[harmonic_index(l, m)];
                c += p * field.coeffs[harmonic_index(l, m)];
                if (m > 0) {
                    s += p * field.coeffs[harmonic_index(l, -m)];
                }
            }
            gc[static_cast<std::size_t>(m)] = c;
            gs[static_cast<std::size_t>(m)] = s;
        }
        double* row = out.data() + k * cols;
        for (std::size_t j = 0; j < cols; ++j) {
            double v = 0.0;
            for (int m = 0; m <= L; ++m) {
                v += gc[static_cast<std::size_t>(m)] * cos_table_[static_cast<std::size_t>(m) * cols + j] +
                     gs[static_cast<std::size_t>(m)] * sin_table_[static_cast<std::size_t>(m) * cols + j];
            }
            row[j] = v;
        }
    }
}

std::vector<double> SphericalTransform::evaluate(const HarmonicField& field) const
{
    std::vector<double> out(grid_->size());
    evaluate(field, out);
    return out;
}

HarmonicField project(const std::function<double(const UnitVec3&)>& f,
                      std::shared_ptr<const QuadratureGrid> grid, int max_degree)
{
    return SphericalTransform(std::move(grid), max_degree).project(f);
}

HarmonicField project(const GridField& f, int max_degree)
{
    return SphericalTransform(f.grid, max_degree).project(f.values);
}

GridField evaluate(const HarmonicField& h, std::shared_ptr<const QuadratureGrid> grid)
{
    // evaluation is exact on any grid; only projection needs resolution
    const SphericalTransform transform(grid, h.max_degree, false);
    return GridField{grid, transform.evaluate(h), 0.0};
}

HarmonicField heat_solve(const HarmonicField& h0, double diffusivity, double t)
{
    if (!(t >= 0.0)) {
        throw std::invalid_argument("heat_solve: time must be non-negative");
    }
    if (!(diffusivity > 0.0)) {
        throw std::invalid_argument("heat_solve: diffusivity must be positive");
    }
    HarmonicField out = h0;
    for (int l = 1; l <= h0.max_degree; ++l) {
        const double decay = std::exp(-diffusivity * static_cast<double>(l * (l + 1)) * t);
        for (int m = -l; m <= l; ++m) {
            out(l, m) *= decay;
        }
    }
    return out;
}

double mean_value(const HarmonicField& h)
{
    return h.coeffs.at(0) / std::sqrt(4.0 * std::numbers::pi);
}

double sup_norm_on(const HarmonicField& h, const QuadratureGrid& grid)
{
    const auto shared = std::make_shared<const QuadratureGrid>(grid);
    const auto values = evaluate(h, shared).values;
    double sup = 0.0;
    for (double v : values) {
        sup = std::max(sup, std::abs(v));
    }
    return sup;
}

}  // namespace sphkura
