#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "sphkura/quadrature.hpp"
#include "sphkura/sphere.hpp"

using namespace sphkura;

namespace {

constexpr double kPi = std::numbers::pi;

double norm(const UnitVec3& p) { return std::sqrt(p.x() * p.x() + p.y() * p.y() + p.z() * p.z()); }

UnitVec3 random_point(std::mt19937_64& rng)
{
    std::normal_distribution<double> g;
    return UnitVec3::normalized(g(rng), g(rng), g(rng));
}

}  // namespace

TEST(UnitVec3, FactoriesProduceUnitNorm)
{
    EXPECT_NEAR(norm(UnitVec3::normalized(3.0, -4.0, 12.0)), 1.0, 1e-12);
    EXPECT_NEAR(norm(UnitVec3::from_spherical(1.1, 4.0)), 1.0, 1e-12);
    EXPECT_THROW(UnitVec3::normalized(0.0, 0.0, 0.0), std::invalid_argument);
    EXPECT_THROW(UnitVec3::from_unit(1.0, 1.0, 0.0), std::invalid_argument);
}

TEST(UnitVec3, SphericalAnglesRoundTrip)
{
    const auto p = UnitVec3::from_spherical(0.7, 5.5);
    EXPECT_NEAR(p.theta(), 0.7, 1e-12);
    EXPECT_NEAR(p.phi(), 5.5, 1e-12);
    EXPECT_GE(UnitVec3::normalized(1.0, -1e-3, 0.0).phi(), 0.0);
}

TEST(SampleUniform, EmptyCloud)
{
    EXPECT_EQ(sample_uniform(0, 42).size(), 0u);
}

TEST(SampleUniform, DeterministicPerSeed)
{
    const auto a = sample_uniform(1000, 9);
    const auto b = sample_uniform(1000, 9);
    const auto c = sample_uniform(1000, 10);
    ASSERT_EQ(a.points.size(), b.points.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a.points[i], b.points[i]);
    }
    EXPECT_NE(a.points[0], c.points[0]);
    EXPECT_EQ(a.seed, 9u);
}

TEST(SampleUniform, CoordinateMeansWithinClt)
{
    const std::size_t n = 100000;
    const auto cloud = sample_uniform(n, 1);
    double mx = 0.0, my = 0.0, mz = 0.0;
    for (const auto& p : cloud.points) {
        EXPECT_NEAR(norm(p), 1.0, 1e-12);
        mx += p.x();
        my += p.y();
        mz += p.z();
    }
    const double bound = 4.0 / std::sqrt(static_cast<double>(n));
    EXPECT_LT(std::abs(mx / n), bound);
    EXPECT_LT(std::abs(my / n), bound);
    EXPECT_LT(std::abs(mz / n), bound);
}

TEST(SampleUniform, CapFractionMatchesCapArea)
{
    const std::size_t n = 100000;
    const double eps = 0.2;
    const auto cloud = sample_uniform(n, 1);
    const auto x0 = UnitVec3::normalized(0.3, -0.2, 0.9);
    std::size_t inside = 0;
    for (const auto& p : cloud.points) {
        inside += euclid_dist2(p, x0) < eps ? 1 : 0;
    }
    const double frac = static_cast<double>(inside) / n;
    const double expected = cap_area(eps) / (4.0 * kPi);
    EXPECT_DOUBLE_EQ(expected, eps / 4.0);
    EXPECT_NEAR(frac, expected, 4.0 * std::sqrt(expected / n));
}

TEST(SampleUniform, RotationInvariantCapCounts)
{
    // chi-square on 12 caps around the icosahedron vertices
    const double g = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<UnitVec3> centers;
    for (double a : {-1.0, 1.0}) {
        for (double b : {-g, g}) {
            centers.push_back(UnitVec3::normalized(0, a, b));
            centers.push_back(UnitVec3::normalized(a, b, 0));
            centers.push_back(UnitVec3::normalized(b, 0, a));
        }
    }
    const double eps = 0.3;
    const std::size_t n = 60000;
    const auto cloud = sample_uniform(n, 5);
    const Rotation r{UnitVec3::normalized(1, 2, 3), 0.83};
    std::array<double, 12> original{}, rotated{};
    for (const auto& p : cloud.points) {
        const auto q = apply_rotation(r, p);
        for (std::size_t c = 0; c < 12; ++c) {
            original[c] += euclid_dist2(p, centers[c]) < eps ? 1 : 0;
            rotated[c] += euclid_dist2(q, centers[c]) < eps ? 1 : 0;
        }
    }
    // two-sample chi-square, 11 degrees of freedom; p = 0.001 at 31.26
    double chi2 = 0.0;
    for (std::size_t c = 0; c < 12; ++c) {
        const double total = original[c] + rotated[c];
        chi2 += (original[c] - rotated[c]) * (original[c] - rotated[c]) / total;
    }
    EXPECT_LT(chi2, 31.26);
}

TEST(Distances, Basics)
{
    const auto a = UnitVec3::normalized(1, 2, 3);
    const auto b = UnitVec3::normalized(-1, -2, -3);
    EXPECT_EQ(euclid_dist2(a, a), 0.0);
    EXPECT_NEAR(euclid_dist2(a, b), 4.0, 1e-12);
    EXPECT_EQ(geodesic(a, a), 0.0);
    EXPECT_NEAR(geodesic(UnitVec3::normalized(1, 0, 0), UnitVec3::normalized(0, 1, 0)), kPi / 2, 1e-15);
    EXPECT_NEAR(geodesic(a, b), kPi, 1e-7);
}

TEST(Distances, ChordGeodesicIdentity)
{
    std::mt19937_64 rng(3);
    for (int k = 0; k < 1000; ++k) {
        const auto a = random_point(rng);
        const auto b = random_point(rng);
        EXPECT_NEAR(euclid_dist2(a, b), 2.0 - 2.0 * dot(a, b), 1e-12);
        EXPECT_NEAR(euclid_dist2(a, b), 2.0 - 2.0 * std::cos(geodesic(a, b)), 1e-12);
        EXPECT_EQ(euclid_dist2(a, b), euclid_dist2(b, a));
        const double d = euclid_dist2(a, b);
        EXPECT_GE(d, 0.0);
        EXPECT_LE(d, 4.0);
    }
}

TEST(Distances, GeodesicClampsNearIdenticalPoints)
{
    const auto a = UnitVec3::normalized(1.0, 1e-9, 0.0);
    const auto b = UnitVec3::normalized(1.0, 1.0000001e-9, 0.0);
    EXPECT_FALSE(std::isnan(geodesic(a, b)));
}

TEST(CapArea, ClosedForms)
{
    EXPECT_DOUBLE_EQ(cap_area(4.0), 4.0 * kPi);
    EXPECT_DOUBLE_EQ(cap_area(2.0), 2.0 * kPi);
    EXPECT_THROW(cap_area(0.0), std::invalid_argument);
    EXPECT_THROW(cap_area(4.5), std::invalid_argument);
}

TEST(CapArea, MonteCarloAgreement)
{
    const std::size_t n = 1000000;
    const auto cloud = sample_uniform(n, 77);
    const UnitVec3 north;
    std::size_t inside = 0;
    for (const auto& p : cloud.points) {
        inside += euclid_dist2(p, north) < 0.1 ? 1 : 0;
    }
    const double mc = 4.0 * kPi * static_cast<double>(inside) / n;
    EXPECT_NEAR(mc / cap_area(0.1), 1.0, 0.01);
}

TEST(Rotation, IdentityAndQuarterTurn)
{
    const auto p = UnitVec3::normalized(0.2, 0.5, -0.7);
    const auto same = apply_rotation({UnitVec3::normalized(1, 1, 0), 0.0}, p);
    EXPECT_NEAR(same.x(), p.x(), 1e-15);
    EXPECT_NEAR(same.y(), p.y(), 1e-15);
    EXPECT_NEAR(same.z(), p.z(), 1e-15);
    const auto q = apply_rotation({UnitVec3::normalized(0, 0, 1), kPi / 2}, UnitVec3::normalized(1, 0, 0));
    EXPECT_NEAR(q.x(), 0.0, 1e-12);
    EXPECT_NEAR(q.y(), 1.0, 1e-12);
    EXPECT_NEAR(q.z(), 0.0, 1e-12);
}

TEST(Rotation, IsometryAndUnitNorm)
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> angle(-kPi, kPi);
    for (int k = 0; k < 200; ++k) {
        const Rotation r{random_point(rng), angle(rng)};
        const auto p = random_point(rng);
        const auto q = random_point(rng);
        const auto rp = apply_rotation(r, p);
        const auto rq = apply_rotation(r, q);
        EXPECT_NEAR(norm(rp), 1.0, 1e-12);
        EXPECT_NEAR(euclid_dist2(rp, rq), euclid_dist2(p, q), 1e-12);
    }
}

TEST(Rotation, EquatorDisplacement)
{
    // for a rotation about z, |r(x) - x| on the equator is 2 sin(angle / 2)
    const Rotation r{UnitVec3::normalized(0, 0, 1), 0.4};
    const auto x = UnitVec3::normalized(1, 0, 0);
    EXPECT_NEAR(std::sqrt(euclid_dist2(apply_rotation(r, x), x)), 2.0 * std::sin(0.2), 1e-12);
}

TEST(Harmonics, LowDegreeClosedForms)
{
    std::mt19937_64 rng(4);
    for (int k = 0; k < 50; ++k) {
        const auto p = random_point(rng);
        EXPECT_NEAR(real_spherical_harmonic(0, 0, p), 1.0 / std::sqrt(4.0 * kPi), 1e-14);
        EXPECT_NEAR(real_spherical_harmonic(1, 0, p), oracle::y10(p), 1e-14);
        EXPECT_NEAR(real_spherical_harmonic(2, 0, p), oracle::y20(p), 1e-14);
        const double c1 = std::sqrt(3.0 / (4.0 * kPi));
        EXPECT_NEAR(real_spherical_harmonic(1, 1, p), c1 * p.x(), 1e-14);
        EXPECT_NEAR(real_spherical_harmonic(1, -1, p), c1 * p.y(), 1e-14);
        const double c2 = std::sqrt(15.0 / (4.0 * kPi));
        EXPECT_NEAR(real_spherical_harmonic(2, -2, p), c2 * p.x() * p.y(), 1e-14);
    }
}

TEST(Harmonics, RejectsInvalidOrder)
{
    EXPECT_THROW(real_spherical_harmonic(2, 3, UnitVec3{}), std::invalid_argument);
    EXPECT_THROW(real_spherical_harmonic(-1, 0, UnitVec3{}), std::invalid_argument);
}

TEST(Harmonics, OrthonormalUnderQuadrature)
{
    const int L = 8;
    const QuadratureGrid grid(L + 2, 2 * L + 2);
    const std::size_t count = harmonic_count(L);
    std::vector<double> table(grid.size() * count);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        real_spherical_harmonics(L, grid.nodes()[i], std::span<double>(table.data() + i * count, count));
    }
    for (std::size_t a = 0; a < count; ++a) {
        for (std::size_t b = a; b < count; ++b) {
            double s = 0.0;
            for (std::size_t i = 0; i < grid.size(); ++i) {
                s += grid.weights()[i] * table[i * count + a] * table[i * count + b];
            }
            EXPECT_NEAR(s, a == b ? 1.0 : 0.0, 1e-8) << a << "," << b;
        }
    }
}

TEST(Harmonics, HighDegreeStable)
{
    std::vector<double> out(harmonic_count(kDefaultMaxDegree));
    real_spherical_harmonics(kDefaultMaxDegree, UnitVec3::normalized(0.1, 0.2, 0.97), out);
    for (double v : out) {
        EXPECT_TRUE(std::isfinite(v));
        EXPECT_LT(std::abs(v), 10.0);
    }
}

TEST(Harmonics, FiniteDifferenceEigenrelation)
{
    // Laplace-Beltrami in (theta, phi) by central differences
    const double h = 1e-4;
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> th(0.4, kPi - 0.4), ph(0.0, 2.0 * kPi);
    for (int l = 0; l <= 4; ++l) {
        for (int m = -l; m <= l; ++m) {
            for (int k = 0; k < 5; ++k) {
                const double t = th(rng), p = ph(rng);
                const auto f = [&](double a, double b) {
                    return real_spherical_harmonic(l, m, UnitVec3::from_spherical(a, b));
                };
                const double f0 = f(t, p);
                const double dt2 = (f(t + h, p) - 2 * f0 + f(t - h, p)) / (h * h);
                const double dt1 = (f(t + h, p) - f(t - h, p)) / (2 * h);
                const double dp2 = (f(t, p + h) - 2 * f0 + f(t, p - h)) / (h * h);
                const double lap = dt2 + std::cos(t) / std::sin(t) * dt1 + dp2 / (std::sin(t) * std::sin(t));
                const double expected = -l * (l + 1) * f0;
                EXPECT_LE(std::abs(lap - expected), 1e-3 * std::max(1.0, std::abs(expected)))
                    << "l=" << l << " m=" << m;
            }
        }
    }
}
