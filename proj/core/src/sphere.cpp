#include "sphkura/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace sphkura {

UnitVec3 UnitVec3::normalized(double x, double y, double z)
{
    const double norm = std::sqrt(x * x + y * y + z * z);
    if (!(norm > 1e-300)) {
        throw std::invalid_argument("UnitVec3: cannot normalize a zero vector");
    }
    return UnitVec3(x / norm, y / norm, z / norm);
}

UnitVec3 UnitVec3::from_unit(double x, double y, double z)
{
    if (!(std::abs(std::sqrt(x * x + y * y + z * z) - 1.0) <= 1e-12)) {
        throw std::invalid_argument("UnitVec3: coordinates are not a unit vector");
    }
    return UnitVec3(x, y, z);
}

UnitVec3 UnitVec3::from_spherical(double theta, double phi) noexcept
{
    const double s = std::sin(theta);
    return UnitVec3(s * std::cos(phi), s * std::sin(phi), std::cos(theta));
}

double UnitVec3::theta() const noexcept
{
    return std::acos(std::clamp(z_, -1.0, 1.0));
}

double UnitVec3::phi() const noexcept
{
    double p = std::atan2(y_, x_);
    if (p < 0.0) {
        p += 2.0 * std::numbers::pi;
    }
    // atan2 can round -tiny up to exactly 2pi
    return p >= 2.0 * std::numbers::pi ? 0.0 : p;
}

double dot(const UnitVec3& a, const UnitVec3& b) noexcept
{
    return a.x() * b.x() + a.y() * b.y() + a.z() * b.z();
}

double euclid_dist2(const UnitVec3& a, const UnitVec3& b) noexcept
{
    const double dx = a.x() - b.x();
    const double dy = a.y() - b.y();
    const double dz = a.z() - b.z();
    return dx * dx + dy * dy + dz * dz;
}

double geodesic(const UnitVec3& a, const UnitVec3& b) noexcept
{
    return std::acos(std::clamp(dot(a, b), -1.0, 1.0));
}

double cap_area(double eps)
{
    if (!(eps > 0.0 && eps <= 4.0)) {
        throw std::invalid_argument("cap_area: eps must lie in (0, 4], got " + std::to_string(eps));
    }
    return std::numbers::pi * eps;
}

double cap_geodesic_radius(double eps)
{
    if (eps >= 4.0) {
        return std::numbers::pi;
    }
    return 2.0 * std::asin(std::sqrt(std::max(eps, 0.0)) / 2.0);
}

PointCloud sample_uniform(std::size_t n, std::uint64_t seed)
{
    PointCloud cloud;
    cloud.seed = seed;
    cloud.points.reserve(n);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    while (cloud.points.size() < n) {
        const double x = gauss(rng);
        const double y = gauss(rng);
        const double z = gauss(rng);
        if (x * x + y * y + z * z < 1e-16) {
            continue;
        }
        cloud.points.push_back(UnitVec3::normalized(x, y, z));
    }
    return cloud;
}

UnitVec3 apply_rotation(const Rotation& r, const UnitVec3& p) noexcept
{
    const auto& k = r.axis;
    const double c = std::cos(r.angle);
    const double s = std::sin(r.angle);
    const double kv = dot(k, p);
    const double cx = k.y() * p.z() - k.z() * p.y();
    const double cy = k.z() * p.x() - k.x() * p.z();
    const double cz = k.x() * p.y() - k.y() * p.x();
    return UnitVec3::normalized(p.x() * c + cx * s + k.x() * kv * (1.0 - c),
                                p.y() * c + cy * s + k.y() * kv * (1.0 - c),
                                p.z() * c + cz * s + k.z() * kv * (1.0 - c));
}

void normalized_legendre(int max_degree, double cos_theta, std::span<double> out)
{
    if (max_degree < 0 || out.size() < harmonic_count(max_degree)) {
        throw std::invalid_argument("normalized_legendre: output span too small");
    }
    const double x = cos_theta;
    const double s = std::sqrt(std::max(0.0, 1.0 - x * x));

    double pmm = 1.0 / std::sqrt(4.0 * std::numbers::pi);
    for (int m = 0; m <= max_degree; ++m) {
        if (m > 0) {
            pmm *= std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s;
        }
        out[harmonic_index(m, m)] = pmm;
        if (m + 1 > max_degree) {
            break;
        }
        double prev = pmm;
        double cur = std::sqrt(2.0 * m + 3.0) * x * pmm;
        out[harmonic_index(m + 1, m)] = cur;
        for (int l = m + 2; l <= max_degree; ++l) {
            const double ll = static_cast<double>(l);
            const double mm = static_cast<double>(m);
            const double a = std::sqrt((4.0 * ll * ll - 1.0) / (ll * ll - mm * mm));
            const double b = std::sqrt(((ll - 1.0) * (ll - 1.0) - mm * mm) / (4.0 * (ll - 1.0) * (ll - 1.0) - 1.0));
            const double next = a * (x * cur - b * prev);
            out[harmonic_index(l, m)] = next;
            prev = cur;
            cur = next;
        }
    }
}

void real_spherical_harmonics(int max_degree, const UnitVec3& p, std::span<double> out)
{
    normalized_legendre(max_degree, p.z(), out);
    const double phi = p.phi();
    for (int m = max_degree; m >= 1; --m) {
        const double c = std::numbers::sqrt2 * std::cos(m * phi);
        const double s = std::numbers::sqrt2 * std::sin(m * phi);
        for (int l = m; l <= max_degree; ++l) {
            const double plm = out[harmonic_index(l, m)];
            out[harmonic_index(l, m)] = plm * c;
            out[harmonic_index(l, -m)] = plm * s;
        }
    }
}

double real_spherical_harmonic(int l, int m, const UnitVec3& p)
{
    if (l < 0 || std::abs(m) > l) {
        throw std::invalid_argument("real_spherical_harmonic: need |m| <= l, got l=" + std::to_string(l) +
                                    " m=" + std::to_string(m));
    }
    std::vector<double> table(harmonic_count(l));
    normalized_legendre(l, p.z(), table);
    const double plm = table[harmonic_index(l, std::abs(m))];
    if (m == 0) {
        return plm;
    }
    const double phi = p.phi();
    return m > 0 ? std::numbers::sqrt2 * plm * std::cos(m * phi)
                 : std::numbers::sqrt2 * plm * std::sin(-m * phi);
}

}  // namespace sphkura
