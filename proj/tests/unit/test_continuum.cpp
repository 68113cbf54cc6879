#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "sphkura/continuum.hpp"
#include "sphkura/harmonics.hpp"
#include "sphkura/quadrature.hpp"

using namespace sphkura;

namespace {

constexpr double kPi = std::numbers::pi;

std::shared_ptr<const QuadratureGrid> grid_ptr(std::size_t nt, std::size_t np)
{
    return std::make_shared<const QuadratureGrid>(nt, np);
}

HarmonicField random_field(int L, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    HarmonicField h(L);
    for (auto& c : h.coeffs) {
        c = g(rng);
    }
    return h;
}

double sup_diff(const std::vector<double>& a, const std::vector<double>& b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s = std::max(s, std::abs(a[i] - b[i]));
    }
    return s;
}

}  // namespace

// --- quadrature -------------------------------------------------------------------

TEST(GaussLegendre, IntegratesPolynomialsExactly)
{
    const auto rule = gauss_legendre(12);
    for (int p = 0; p <= 23; ++p) {
        double s = 0.0;
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
            s += rule.weights[k] * std::pow(rule.nodes[k], p);
        }
        EXPECT_NEAR(s, p % 2 ? 0.0 : 2.0 / (p + 1), 1e-14) << p;
    }
    EXPECT_TRUE(std::is_sorted(rule.nodes.begin(), rule.nodes.end()));
}

TEST(QuadratureGrid, BasicIntegrals)
{
    const auto grid = make_grid(16, 32);
    double wsum = 0.0;
    for (double w : grid.weights()) {
        EXPECT_GT(w, 0.0);
        wsum += w;
    }
    EXPECT_NEAR(wsum, 4.0 * kPi, 1e-10);
    EXPECT_NEAR(grid.integrate([](const UnitVec3&) { return 1.0; }), 4.0 * kPi, 1e-10);
    EXPECT_NEAR(grid.integrate([](const UnitVec3& p) { return p.z(); }), 0.0, 1e-10);
    const double closed = 2.0 * kPi * oracle::simpson([](double s) { return s * s; }, -1.0, 1.0, 100);
    EXPECT_NEAR(grid.integrate([](const UnitVec3& p) { return p.z() * p.z(); }), closed, 1e-10);
    EXPECT_NEAR(closed, 4.0 * kPi / 3.0, 1e-12);
}

TEST(QuadratureGrid, PolynomialExactnessInCosTheta)
{
    const std::size_t nt = 10;
    const auto grid = make_grid(nt, 8);
    for (int p = 0; p <= static_cast<int>(2 * nt - 1); ++p) {
        const double exact = p % 2 ? 0.0 : 4.0 * kPi / (p + 1);
        EXPECT_NEAR(grid.integrate([p](const UnitVec3& x) { return std::pow(x.z(), p); }), exact, 1e-10) << p;
    }
}

TEST(QuadratureGrid, RejectsDegenerateSizes)
{
    EXPECT_THROW(make_grid(1, 8), std::invalid_argument);
    EXPECT_THROW(make_grid(4, 3), std::invalid_argument);
    EXPECT_TRUE(make_grid(9, 17).resolves(8));
    EXPECT_FALSE(make_grid(8, 17).resolves(8));
    EXPECT_EQ(make_grid(64, 128).max_resolved_degree(), 63);
}

// --- harmonic transform -------------------------------------------------------------

TEST(Transform, ConstantAndZ)
{
    const auto grid = grid_ptr(12, 24);
    const auto one = project([](const UnitVec3&) { return 1.0; }, grid, 8);
    EXPECT_NEAR(one(0, 0), std::sqrt(4.0 * kPi), 1e-12);
    const auto z = project([](const UnitVec3& p) { return p.z(); }, grid, 8);
    for (int l = 0; l <= 8; ++l) {
        for (int m = -l; m <= l; ++m) {
            const double expected = (l == 1 && m == 0) ? std::sqrt(4.0 * kPi / 3.0) : 0.0;
            EXPECT_NEAR(z(l, m), expected, 1e-10) << l << "," << m;
        }
    }
}

TEST(Transform, RoundTripBandLimited)
{
    const int L = 8;
    const auto grid = grid_ptr(L + 1, 2 * L + 1);
    for (std::uint64_t s = 0; s < 5; ++s) {
        const auto h = random_field(L, s);
        const auto back = project(evaluate(h, grid), L);
        for (std::size_t k = 0; k < h.coeffs.size(); ++k) {
            EXPECT_NEAR(back.coeffs[k], h.coeffs[k], 1e-8);
        }
    }
}

TEST(Transform, EvaluateMatchesPointwise)
{
    const auto h = random_field(6, 9);
    const auto grid = grid_ptr(5, 9);  // evaluation is exact even when unresolved
    const auto f = evaluate(h, grid);
    for (std::size_t i = 0; i < grid->size(); ++i) {
        EXPECT_NEAR(f.values[i], h.evaluate(grid->nodes()[i]), 1e-12);
    }
}

// --- heat ----------------------------------------------------------------------------

TEST(Heat, IdentityAtZeroAndMeanPreserved)
{
    const auto h = random_field(6, 1);
    const auto h0 = heat_solve(h, 0.125, 0.0);
    EXPECT_EQ(h0.coeffs, h.coeffs);
    for (double t : {0.5, 3.0, 40.0}) {
        EXPECT_EQ(heat_solve(h, 0.125, t)(0, 0), h(0, 0));
    }
    EXPECT_THROW(heat_solve(h, 0.125, -1.0), std::invalid_argument);
    EXPECT_THROW(heat_solve(h, 0.0, 1.0), std::invalid_argument);
}

TEST(Heat, DegreeOneDecay)
{
    HarmonicField h(4);
    h(1, 0) = 0.5;
    EXPECT_NEAR(heat_solve(h, 0.125, 1.0)(1, 0), 0.5 * std::exp(-0.25), 1e-15);
}

TEST(Heat, Semigroup)
{
    const auto h = random_field(10, 3);
    const auto a = heat_solve(heat_solve(h, 0.2, 0.3), 0.2, 0.9);
    const auto b = heat_solve(h, 0.2, 1.2);
    for (std::size_t k = 0; k < h.coeffs.size(); ++k) {
        EXPECT_NEAR(a.coeffs[k], b.coeffs[k], 1e-12);
    }
}

TEST(Heat, MaxPrincipleAndMeanConvergence)
{
    const auto grid = make_grid(30, 60);
    for (std::uint64_t s = 0; s < 5; ++s) {
        const auto h = random_field(8, 10 + s);
        const double sup0 = sup_norm_on(h, grid);
        HarmonicField fluct = h;
        fluct(0, 0) = 0.0;
        const double dev0 = sup_norm_on(fluct, grid);
        for (double t : {0.1, 1.0, 5.0}) {
            const auto ht = heat_solve(h, 0.125, t);
            EXPECT_LE(sup_norm_on(ht, grid), sup0 + 1e-6);
            HarmonicField dev = ht;
            dev(0, 0) = 0.0;
            EXPECT_LE(sup_norm_on(dev, grid), std::exp(-0.25 * t) * dev0 + 1e-12);
        }
    }
}

TEST(Heat, MeanValue)
{
    HarmonicField h(3);
    h(0, 0) = 2.0 * std::sqrt(4.0 * kPi);
    EXPECT_NEAR(mean_value(h), 2.0, 1e-15);
    HarmonicField g(3);
    g(2, 1) = 1.0;
    EXPECT_EQ(mean_value(g), 0.0);
    const auto grid = grid_ptr(10, 20);
    const auto u = project([](const UnitVec3& p) { return 0.5 + 0.3 * p.z(); }, grid, 4);
    const double quad = grid->integrate([](const UnitVec3& p) { return 0.5 + 0.3 * p.z(); }) / (4.0 * kPi);
    EXPECT_NEAR(mean_value(u), quad, 1e-12);
    EXPECT_NEAR(mean_value(u), 0.5, 1e-12);
}

// --- constants -----------------------------------------------------------------------

TEST(DiffusionConstant, Indicator)
{
    const auto c = diffusion_constant(Kernel::indicator());
    EXPECT_NEAR(c.second_moment, kPi / 2, 1e-8);
    EXPECT_NEAR(c.kappa, kPi / 8, 1e-8);
    EXPECT_NEAR(c.d_effective, 0.125, 1e-8);
    EXPECT_EQ(c.c2, kPi);
}

TEST(DiffusionConstant, SmoothBump)
{
    const auto c = diffusion_constant(Kernel::smooth_bump());
    const double m2 = oracle::simpson([](double r) { return 2 * kPi * r * r * r * std::pow(1 - r * r, 2); }, 0, 1);
    EXPECT_NEAR(c.second_moment, m2, 1e-10);
    EXPECT_NEAR(c.second_moment, kPi / 12, 1e-8);
    EXPECT_NEAR(c.d_effective, 1.0 / 48, 1e-8);
}

TEST(DiffusionConstant, CustomKernel)
{
    const auto k = Kernel::parse("custom:1,0.5,0");
    const double m2 = oracle::simpson([&](double r) { return 2 * kPi * r * r * r * k.profile(r * r); }, 0, 1);
    EXPECT_NEAR(diffusion_constant(k).second_moment, m2, 1e-9);
}

TEST(AdaptiveSimpson, Accuracy)
{
    EXPECT_NEAR(adaptive_simpson([](double x) { return std::exp(x); }, 0, 1, 1e-12), std::exp(1.0) - 1, 1e-11);
}

// --- nonlocal operator ----------------------------------------------------------------

TEST(NonlocalApply, ConstantGivesZero)
{
    for (double eps : {0.01, 0.3, 2.0}) {
        EXPECT_NEAR(nonlocal_apply([](const UnitVec3&) { return 3.0; }, UnitVec3::normalized(1, 2, 3), eps,
                                   Kernel::indicator()),
                    0.0, 1e-12);
    }
}

TEST(NonlocalApply, NorthPoleZ)
{
    const double v = nonlocal_apply([](const UnitVec3& p) { return p.z(); }, UnitVec3{}, 0.01, Kernel::indicator());
    EXPECT_NEAR(v, -0.25, 0.25 * 0.05);
    // hand expansion: (2 / eps^2) int_{1 - eps/2}^1 (s - 1) ds = -1/4 exactly
    EXPECT_NEAR(v, -0.25, 1e-12);
}

TEST(NonlocalApply, MatchesIndependentEigenvalues)
{
    const auto bump = Kernel::smooth_bump();
    const auto profile = [&](double r) { return bump.profile(r); };
    const auto x = UnitVec3::normalized(0.3, -0.5, 0.8);
    for (double eps : {0.5, 0.05}) {
        for (int l = 1; l <= 4; ++l) {
            const auto f = [l](const UnitVec3& p) { return real_spherical_harmonic(l, 0, p); };
            const double expected = oracle::nonlocal_eigenvalue(l, eps, profile) * f(x);
            EXPECT_NEAR(nonlocal_apply(f, x, eps, bump), expected, 1e-9) << "l=" << l << " eps=" << eps;
        }
    }
}

TEST(NonlocalApply, RotationEquivariance)
{
    const Rotation r{UnitVec3::normalized(1, -1, 2), 1.1};
    const Rotation inv{r.axis, -r.angle};
    const auto f = [](const UnitVec3& p) { return std::exp(p.x()) * p.z() + p.y() * p.y(); };
    const auto rf = [&](const UnitVec3& p) { return f(apply_rotation(inv, p)); };
    const auto x = UnitVec3::normalized(0.2, 0.4, -0.3);
    const double a = nonlocal_apply(f, x, 0.05, Kernel::indicator());
    const double b = nonlocal_apply(rf, apply_rotation(r, x), 0.05, Kernel::indicator());
    EXPECT_NEAR(a, b, 1e-9);
}

TEST(NonlocalApply, RejectsUnderResolvedCap)
{
    const auto f = [](const UnitVec3& p) { return p.z(); };
    EXPECT_THROW(nonlocal_apply(f, UnitVec3{}, 0.1, Kernel::indicator(), CapRule{4, 8}), std::invalid_argument);
    EXPECT_NO_THROW(nonlocal_apply(f, UnitVec3{}, 0.1, Kernel::indicator(), CapRule{5, 10}));
}

TEST(NonlocalApply, GridFieldOverload)
{
    const auto grid = grid_ptr(20, 40);
    GridField g{grid, grid->sample([](const UnitVec3& p) { return p.x() * p.z(); }), 0.0};
    const auto x = UnitVec3::normalized(1, 1, 1);
    const double direct = nonlocal_apply([](const UnitVec3& p) { return p.x() * p.z(); }, x, 0.1, Kernel::indicator());
    EXPECT_NEAR(nonlocal_apply(g, x, 0.1, Kernel::indicator()), direct, 1e-10);
}

TEST(OperatorConvergence, ConstantFieldHasNoError)
{
    HarmonicField h(2);
    h(0, 0) = 1.0;
    const auto pts = sample_uniform(20, 1).points;
    const std::vector<double> eps{0.08, 0.04};
    const auto rep = operator_convergence_test(h, eps, Kernel::indicator(), pts);
    for (double e : rep.sup_errors) {
        EXPECT_LT(e, 1e-12);
    }
}

TEST(OperatorConvergence, Y20ConvergesAtFirstOrder)
{
    HarmonicField h(2);
    h(2, 0) = 1.0;
    const auto pts = sample_uniform(50, 2).points;
    const std::vector<double> eps{0.08, 0.04, 0.02, 0.01};
    const auto rep = operator_convergence_test(h, eps, Kernel::indicator(), pts);
    EXPECT_TRUE(rep.monotone_decreasing);
    EXPECT_NEAR(rep.slope, 1.0, 0.05);
    EXPECT_DOUBLE_EQ(rep.d_effective, 0.125);
}

TEST(OperatorConvergence, Y10IsAnExactEigenfunction)
{
    // the chord-distance kernel maps degree-1 harmonics to exactly -2D times
    // themselves, so the error is rounding at every eps
    HarmonicField h(1);
    h(1, 0) = 1.0;
    const auto pts = sample_uniform(50, 3).points;
    const std::vector<double> eps{0.08, 0.04, 0.02, 0.01};
    const auto rep = operator_convergence_test(h, eps, Kernel::indicator(), pts);
    for (double e : rep.sup_errors) {
        EXPECT_LT(e, 1e-11);
    }
}

TEST(LoglogSlope, KnownPowerLaw)
{
    const std::vector<double> x{1, 2, 4, 8};
    const std::vector<double> y{3, 12, 48, 192};
    EXPECT_NEAR(loglog_slope(x, y), 2.0, 1e-12);
    EXPECT_TRUE(std::isnan(loglog_slope(x, std::vector<double>{1, 0, 1, 1})));
    EXPECT_THROW(loglog_slope(std::vector<double>{1}, std::vector<double>{1}), std::invalid_argument);
}

TEST(ZonalMultipliers, MatchIndependentQuadrature)
{
    const auto k = Kernel::indicator();
    const double eps = 0.3;
    const auto mult = zonal_multipliers(k, eps, 6);
    for (int l = 0; l <= 6; ++l) {
        const double ref = 2 * kPi * oracle::simpson([&](double s) { return std::legendre(l, s); }, 1 - eps / 2, 1);
        EXPECT_NEAR(mult[static_cast<std::size_t>(l)], ref, 1e-12) << l;
    }
    EXPECT_NEAR(mult[0], cap_area(eps), 1e-13);
}

TEST(NonlocalOperator, EigenvaluesAgreeWithPointwiseRule)
{
    const auto grid = grid_ptr(32, 64);
    const auto k = Kernel::smooth_bump();
    const NonlocalOperator op(grid, 0.05, k);
    for (int l = 0; l <= 6; ++l) {
        const double ref = oracle::nonlocal_eigenvalue(l, 0.05, [&](double r) { return k.profile(r); });
        EXPECT_NEAR(op.linear_eigenvalue(l), ref, 1e-9) << l;
        EXPECT_LE(std::abs(op.linear_eigenvalue(l)), op.spectral_radius());
    }
    EXPECT_NEAR(op.linear_eigenvalue(1), -2.0 / 48.0, 1e-12);
}

TEST(NonlocalOperator, GridApplyMatchesPointwise)
{
    const auto grid = grid_ptr(24, 48);
    const auto k = Kernel::indicator();
    const double eps = 0.2;
    const NonlocalOperator op(grid, eps, k);
    const auto f = [](const UnitVec3& p) { return 0.4 * p.z() + 0.2 * p.x() * p.y(); };
    const auto u = grid->sample(f);
    const auto lin = op.apply(u, Coupling::Identity);
    const auto sine = op.apply(u, Coupling::Sine);
    for (std::size_t i = 0; i < grid->size(); i += 37) {
        const auto x = grid->nodes()[i];
        EXPECT_NEAR(lin[i], nonlocal_apply(f, x, eps, k), 1e-10);
        // J = sin: integrate sin(u(y) - u(x)) directly with a finer cap rule
        const double ux = f(x);
        const double direct = nonlocal_apply([&](const UnitVec3& y) { return std::sin(f(y) - ux); }, x, eps, k,
                                             CapRule{48, 96});
        EXPECT_NEAR(sine[i], direct, 1e-6);
    }
}

// --- integral equation --------------------------------------------------------------------

TEST(IntegralEquation, ConstantStaysConstant)
{
    const auto grid = grid_ptr(16, 32);
    GridField u0{grid, std::vector<double>(grid->size(), 0.7), 0.0};
    for (auto c : {Coupling::Sine, Coupling::Identity}) {
        const auto traj = integral_equation_solve(u0, 0.1, Kernel::indicator(), 1.0, c);
        for (const auto& f : traj) {
            for (double v : f.values) {
                EXPECT_NEAR(v, 0.7, 1e-12);
            }
        }
    }
}

TEST(IntegralEquation, SmallAmplitudeLinearization)
{
    const auto grid = grid_ptr(32, 64);
    GridField u0{grid, grid->sample([](const UnitVec3& p) { return 0.01 * (p.z() + p.x() * p.y()); }), 0.0};
    const auto a = integral_equation_solve(u0, 0.05, Kernel::indicator(), 1.0, Coupling::Sine);
    const auto b = integral_equation_solve(u0, 0.05, Kernel::indicator(), 1.0, Coupling::Identity);
    EXPECT_DOUBLE_EQ(a.back().t, 1.0);
    EXPECT_LE(sup_diff(a.back().values, b.back().values), 1e-5);
}

TEST(IntegralEquation, IdentityPreservesMean)
{
    const auto grid = grid_ptr(24, 48);
    GridField u0{grid, grid->sample([](const UnitVec3& p) { return std::exp(p.x()) + p.z() * p.z(); }), 0.0};
    const double m0 = grid->integrate(u0.values);
    const auto traj = integral_equation_solve(u0, 0.1, Kernel::smooth_bump(), 2.0, Coupling::Identity);
    for (const auto& f : traj) {
        EXPECT_NEAR(grid->integrate(f.values) / (4 * kPi), m0 / (4 * kPi), 1e-8);
    }
}

TEST(IntegralEquation, ComparisonPrinciple)
{
    const auto grid = grid_ptr(24, 48);
    const auto f = [](const UnitVec3& p) { return std::sin(3 * p.x()) * p.z(); };
    GridField u0{grid, grid->sample(f), 0.0};
    GridField v0{grid, grid->sample([&](const UnitVec3& p) { return f(p) + 0.1 + 0.05 * p.y() * p.y(); }), 0.0};
    IntegralSolveOptions opt;
    opt.max_degree = 16;
    const auto u = integral_equation_solve(u0, 0.1, Kernel::indicator(), 1.0, Coupling::Identity, opt);
    const auto v = integral_equation_solve(v0, 0.1, Kernel::indicator(), 1.0, Coupling::Identity, opt);
    ASSERT_EQ(u.size(), v.size());
    for (std::size_t k = 0; k < u.size(); ++k) {
        for (std::size_t i = 0; i < grid->size(); ++i) {
            EXPECT_LE(u[k].values[i], v[k].values[i] + 1e-9);
        }
    }
}

TEST(IntegralEquation, SineSolutionApproachesHeat)
{
    const auto grid = grid_ptr(32, 64);
    GridField u0{grid, grid->sample([](const UnitVec3& p) { return 0.3 * p.z(); }), 0.0};
    double previous = 1e9;
    for (double eps : {0.08, 0.02}) {
        const auto traj = integral_equation_solve(u0, eps, Kernel::indicator(), 1.0, Coupling::Sine);
        double gap = 0.0;
        for (std::size_t i = 0; i < grid->size(); ++i) {
            gap = std::max(gap, std::abs(traj.back().values[i] - 0.3 * std::exp(-0.25) * grid->nodes()[i].z()));
        }
        EXPECT_LT(gap, previous);
        previous = gap;
    }
}

TEST(IntegralEquation, RejectsBadArguments)
{
    const auto grid = grid_ptr(8, 16);
    GridField u0{grid, std::vector<double>(grid->size(), 0.0), 0.0};
    EXPECT_THROW(integral_equation_solve(u0, 0.1, Kernel::indicator(), 0.0, Coupling::Sine), std::invalid_argument);
    GridField bad{grid, std::vector<double>(3), 0.0};
    EXPECT_THROW(integral_equation_solve(bad, 0.1, Kernel::indicator(), 1.0, Coupling::Sine), std::invalid_argument);
    GridField nan{grid, std::vector<double>(grid->size(), std::nan("")), 0.0};
    EXPECT_THROW(integral_equation_solve(nan, 0.1, Kernel::indicator(), 1.0, Coupling::Sine), NumericalError);
}
