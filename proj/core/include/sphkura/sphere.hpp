#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace sphkura {

/// A point on the unit sphere S^2 embedded in R^3.
///
/// The only way to obtain one is through a factory that normalizes, so every
/// instance has unit norm up to rounding.
class UnitVec3 {
public:
    /// North pole.
    constexpr UnitVec3() noexcept = default;

    /// Normalizes (x, y, z). Throws std::invalid_argument if the norm is below 1e-300.
    static UnitVec3 normalized(double x, double y, double z);

    /// Stores (x, y, z) unchanged; throws if the norm differs from 1 by more
    /// than 1e-12. Used when reloading coordinates that must stay bit-exact.
    static UnitVec3 from_unit(double x, double y, double z);

    /// theta is colatitude in [0, pi], phi is longitude.
    static UnitVec3 from_spherical(double theta, double phi) noexcept;

    constexpr double x() const noexcept { return x_; }
    constexpr double y() const noexcept { return y_; }
    constexpr double z() const noexcept { return z_; }

    double theta() const noexcept;
    /// Longitude in [0, 2pi).
    double phi() const noexcept;

    friend constexpr bool operator==(const UnitVec3&, const UnitVec3&) = default;

private:
    constexpr UnitVec3(double x, double y, double z) noexcept : x_(x), y_(y), z_(z) {}

    double x_ = 0.0;
    double y_ = 0.0;
    double z_ = 1.0;
};

double dot(const UnitVec3& a, const UnitVec3& b) noexcept;

/// Squared Euclidean (chord) distance, in [0, 4]. Computed from coordinate
/// differences so that it is bitwise symmetric in its arguments.
double euclid_dist2(const UnitVec3& a, const UnitVec3& b) noexcept;

/// Geodesic angle arccos<a,b> in [0, pi]; the inner product is clamped first.
double geodesic(const UnitVec3& a, const UnitVec3& b) noexcept;

/// Area of the spherical cap {y : |x - y|^2 < eps}, which is pi * eps.
double cap_area(double eps);

/// Geodesic radius of the cap {y : |x - y|^2 < eps}.
double cap_geodesic_radius(double eps);

struct PointCloud {
    std::vector<UnitVec3> points;
    std::uint64_t seed = 0;

    std::size_t size() const noexcept { return points.size(); }
};

/// n i.i.d. uniform points from normalized standard Gaussians.
PointCloud sample_uniform(std::size_t n, std::uint64_t seed);

struct Rotation {
    UnitVec3 axis;
    double angle = 0.0;
};

/// Rodrigues rotation of p about r.axis by r.angle.
UnitVec3 apply_rotation(const Rotation& r, const UnitVec3& p) noexcept;

// --- real spherical harmonics ---------------------------------------------

/// Degree cap used by configuration validation.
inline constexpr int kDefaultMaxDegree = 32;

/// Index of (l, m) in a flat coefficient array: l*l + l + m.
constexpr std::size_t harmonic_index(int l, int m) noexcept
{
    return static_cast<std::size_t>(l * l + l + m);
}

constexpr std::size_t harmonic_count(int max_degree) noexcept
{
    return static_cast<std::size_t>((max_degree + 1) * (max_degree + 1));
}

/// Fully normalized associated Legendre values without the Condon-Shortley
/// phase, scaled so that Y_l0 = table(l, 0). Layout matches harmonic_index
/// restricted to m >= 0: out[harmonic_index(l, m)] for 0 <= m <= l. The
/// entries for m < 0 are left untouched.
void normalized_legendre(int max_degree, double cos_theta, std::span<double> out);

/// Real orthonormal spherical harmonic Y_lm(p). m > 0 uses cos(m phi),
/// m < 0 uses sin(|m| phi). Throws std::invalid_argument when |m| > l or l < 0.
double real_spherical_harmonic(int l, int m, const UnitVec3& p);

/// All Y_lm(p) for l <= max_degree, written at harmonic_index(l, m).
void real_spherical_harmonics(int max_degree, const UnitVec3& p, std::span<double> out);

}  // namespace sphkura
