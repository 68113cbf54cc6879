#include "sphkura/continuum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "sphkura/errors.hpp"

namespace sphkura {

namespace {

constexpr double kPi = std::numbers::pi;

double simpson_step(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
                    double whole, double tol, int depth)
{
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

/// Composite Gauss-Legendre nodes in r over [0, 1], split at kernel breakpoints.
GaussRule kernel_rule(const Kernel& kernel, std::size_t panels, std::size_t order)
{
    GaussRule out;
    const auto breaks = kernel.breakpoints();
    for (std::size_t b = 0; b + 1 < breaks.size(); ++b) {
        const double width = (breaks[b + 1] - breaks[b]) / static_cast<double>(panels);
        for (std::size_t p = 0; p < panels; ++p) {
            const double a = breaks[b] + width * static_cast<double>(p);
            const auto panel = gauss_legendre(order, a, a + width);
            out.nodes.insert(out.nodes.end(), panel.nodes.begin(), panel.nodes.end());
            out.weights.insert(out.weights.end(), panel.weights.begin(), panel.weights.end());
        }
    }
    return out;
}

/// 2 pi int (P_l(s) - c) K((2 - 2s)/eps) ds for l <= L, with c = 1 when
/// `minus_one` (the eigenvalue form, free of cancellation) and 0 otherwise.
std::vector<double> funk_hecke(const Kernel& kernel, double eps, int max_degree, bool minus_one)
{
    const auto rule = kernel_rule(kernel, 16, 20);
    std::vector<double> out(static_cast<std::size_t>(max_degree) + 1, 0.0);
    // s = 1 - eps r / 2, ds = eps / 2 dr
    const double jac = 2.0 * kPi * eps / 2.0;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const double r = rule.nodes[q];
        const double delta = eps * r / 2.0;  // 1 - s
        const double s = 1.0 - delta;
        const double w = jac * rule.weights[q] * kernel.profile(r);
        // Recurrence on Q_l = P_l(s) - 1 keeps precision when s is close to 1.
        double q_prev = 0.0;      // Q_0
        double q_cur = -delta;    // Q_1
        out[0] += w * (minus_one ? 0.0 : 1.0);
        if (max_degree >= 1) {
            out[1] += w * (q_cur + (minus_one ? 0.0 : 1.0));
        }
        for (int l = 2; l <= max_degree; ++l) {
            const double ll = static_cast<double>(l);
            // P_l = ((2l-1) s P_{l-1} - (l-1) P_{l-2}) / l, rewritten for Q.
            const double q_next = ((2.0 * ll - 1.0) * (s * q_cur - delta) - (ll - 1.0) * q_prev) / ll;
            out[static_cast<std::size_t>(l)] += w * (q_next + (minus_one ? 0.0 : 1.0));
            q_prev = q_cur;
            q_cur = q_next;
        }
    }
    return out;
}

void check_eps_open(double eps, const char* what)
{
    if (!(eps > 0.0 && eps <= 4.0)) {
        std::ostringstream msg;
        msg << what << ": eps must lie in (0, 4], got " << eps;
        throw std::invalid_argument(msg.str());
    }
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol)
{
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_step(f, a, b, fa, fm, fb, whole, tol, 50);
}

ContinuumConstants diffusion_constant(const Kernel& kernel)
{
    ContinuumConstants c;
    c.kernel = kernel.name();
    c.c2 = kPi;
    const auto breaks = kernel.breakpoints();
    const auto integrand = [&](double r) { return 2.0 * kPi * r * r * r * kernel.profile(r * r); };
    double m2 = 0.0;
    for (std::size_t b = 0; b + 1 < breaks.size(); ++b) {
        m2 += adaptive_simpson(integrand, std::sqrt(breaks[b]), std::sqrt(breaks[b + 1]), 1e-10);
    }
    if (!(m2 > 0.0) || !std::isfinite(m2)) {
        throw std::invalid_argument("diffusion_constant: kernel has no positive mass on [0, 1)");
    }
    c.second_moment = m2;
    c.kappa = m2 / 4.0;
    c.d_effective = m2 / (4.0 * c.c2);
    return c;
}

std::vector<double> zonal_multipliers(const Kernel& kernel, double eps, int max_degree)
{
    check_eps_open(eps, "zonal_multipliers");
    if (max_degree < 0) {
        throw std::invalid_argument("zonal_multipliers: negative degree");
    }
    return funk_hecke(kernel, eps, max_degree, false);
}

// --- grid operator --------------------------------------------------------

NonlocalOperator::NonlocalOperator(std::shared_ptr<const QuadratureGrid> grid, double eps, const Kernel& kernel,
                                   int max_degree)
    : transform_(grid, max_degree < 0 ? (grid ? grid->max_resolved_degree() : 0) : max_degree),
      eps_(eps),
      scale_(1.0 / (kPi * eps * eps))
{
    check_eps_open(eps, "NonlocalOperator");
    multipliers_ = zonal_multipliers(kernel, eps, transform_.max_degree());
    differences_ = funk_hecke(kernel, eps, transform_.max_degree(), true);
    spectral_radius_ = 2.0 * scale_ * std::abs(multipliers_[0]);
}

void NonlocalOperator::convolve(std::span<const double> values, std::span<double> out) const
{
    HarmonicField h = transform_.project(values);
    for (int l = 0; l <= h.max_degree; ++l) {
        const double k = multipliers_[static_cast<std::size_t>(l)];
        for (int m = -l; m <= l; ++m) {
            h.coeffs[harmonic_index(l, m)] *= k;
        }
    }
    transform_.evaluate(h, out);
}

void NonlocalOperator::apply(std::span<const double> u, Coupling coupling, std::span<double> out) const
{
    const std::size_t n = transform_.grid().size();
    if (u.size() != n || out.size() != n) {
        throw std::invalid_argument("NonlocalOperator::apply: size does not match grid");
    }
    const double mass = multipliers_[0];
    if (coupling == Coupling::Identity) {
        convolve(u, out);
        for (std::size_t i = 0; i < n; ++i) {
            out[i] = scale_ * (out[i] - mass * u[i]);
        }
        return;
    }
    std::vector<double> s(n), c(n), ks(n), kc(n);
    for (std::size_t i = 0; i < n; ++i) {
        s[i] = std::sin(u[i]);
        c[i] = std::cos(u[i]);
    }
    convolve(s, ks);
    convolve(c, kc);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = scale_ * (c[i] * ks[i] - s[i] * kc[i]);
    }
}

std::vector<double> NonlocalOperator::apply(std::span<const double> u, Coupling coupling) const
{
    std::vector<double> out(u.size());
    apply(u, coupling, out);
    return out;
}

double NonlocalOperator::linear_eigenvalue(int l) const
{
    if (l < 0 || l > transform_.max_degree()) {
        throw std::invalid_argument("NonlocalOperator::linear_eigenvalue: degree out of range");
    }
    return scale_ * differences_[static_cast<std::size_t>(l)];
}

// --- pointwise evaluation -------------------------------------------------

double nonlocal_apply(const std::function<double(const UnitVec3&)>& f, const UnitVec3& x, double eps,
                      const Kernel& kernel, const CapRule& rule)
{
    check_eps_open(eps, "nonlocal_apply");
    if (rule.radial * rule.azimuthal < 50 || rule.radial == 0 || rule.azimuthal == 0) {
        throw std::invalid_argument("nonlocal_apply: cap rule must place at least 50 nodes in the cap");
    }
    // tangent frame at x
    const bool use_x = std::abs(x.x()) < 0.9;
    const double ax = use_x ? 1.0 : 0.0;
    const double ay = use_x ? 0.0 : 1.0;
    const double ad = ax * x.x() + ay * x.y();
    const UnitVec3 e1 = UnitVec3::normalized(ax - ad * x.x(), ay - ad * x.y(), -ad * x.z());
    const UnitVec3 e2 = UnitVec3::normalized(x.y() * e1.z() - x.z() * e1.y(), x.z() * e1.x() - x.x() * e1.z(),
                                             x.x() * e1.y() - x.y() * e1.x());

    std::vector<double> cos_a(rule.azimuthal), sin_a(rule.azimuthal);
    for (std::size_t j = 0; j < rule.azimuthal; ++j) {
        const double a = 2.0 * kPi * static_cast<double>(j) / static_cast<double>(rule.azimuthal);
        cos_a[j] = std::cos(a);
        sin_a[j] = std::sin(a);
    }
    const double dalpha = 2.0 * kPi / static_cast<double>(rule.azimuthal);
    const double fx = f(x);

    double total = 0.0;
    const auto breaks = kernel.breakpoints();
    for (std::size_t b = 0; b + 1 < breaks.size(); ++b) {
        // r in [r0, r1] maps to 1 - s in [eps r0 / 2, eps r1 / 2]
        const double d0 = eps * breaks[b] / 2.0;
        const double d1 = std::min(2.0, eps * breaks[b + 1] / 2.0);
        if (d1 <= d0) {
            continue;
        }
        const auto radial = gauss_legendre(rule.radial, d0, d1);
        for (std::size_t q = 0; q < rule.radial; ++q) {
            const double delta = radial.nodes[q];
            const double s = 1.0 - delta;
            const double sin_rho = std::sqrt(std::max(0.0, delta * (2.0 - delta)));
            const double weight = radial.weights[q] * dalpha * kernel.profile(2.0 * delta / eps);
            double ring = 0.0;
            for (std::size_t j = 0; j < rule.azimuthal; ++j) {
                const double tx = cos_a[j] * e1.x() + sin_a[j] * e2.x();
                const double ty = cos_a[j] * e1.y() + sin_a[j] * e2.y();
                const double tz = cos_a[j] * e1.z() + sin_a[j] * e2.z();
                const UnitVec3 y = UnitVec3::normalized(s * x.x() + sin_rho * tx, s * x.y() + sin_rho * ty,
                                                        s * x.z() + sin_rho * tz);
                ring += f(y) - fx;
            }
            total += weight * ring;
        }
    }
    return total / (kPi * eps * eps);
}

double nonlocal_apply(const HarmonicField& f, const UnitVec3& x, double eps, const Kernel& kernel,
                      const CapRule& rule)
{
    std::vector<double> ylm(harmonic_count(f.max_degree));
    return nonlocal_apply(
        [&](const UnitVec3& p) {
            real_spherical_harmonics(f.max_degree, p, ylm);
            double v = 0.0;
            for (std::size_t i = 0; i < ylm.size(); ++i) {
                v += f.coeffs[i] * ylm[i];
            }
            return v;
        },
        x, eps, kernel, rule);
}

double nonlocal_apply(const GridField& f, const UnitVec3& x, double eps, const Kernel& kernel, const CapRule& rule)
{
    if (!f.grid) {
        throw std::invalid_argument("nonlocal_apply: grid field without a grid");
    }
    return nonlocal_apply(project(f, f.grid->max_resolved_degree()), x, eps, kernel, rule);
}

double loglog_slope(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size() || x.size() < 2) {
        throw std::invalid_argument("loglog_slope: need two or more matching points");
    }
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const auto n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
            return std::numeric_limits<double>::quiet_NaN();
        }
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

OperatorConvergenceReport operator_convergence_test(const HarmonicField& f, std::span<const double> eps_list,
                                                    const Kernel& kernel, std::span<const UnitVec3> sample_points,
                                                    const CapRule& rule)
{
    if (eps_list.empty() || sample_points.empty()) {
        throw std::invalid_argument("operator_convergence_test: need eps values and sample points");
    }
    OperatorConvergenceReport report;
    report.d_effective = diffusion_constant(kernel).d_effective;
    const HarmonicField lap = f.laplacian();
    std::vector<double> target(sample_points.size());
    for (std::size_t p = 0; p < sample_points.size(); ++p) {
        target[p] = report.d_effective * lap.evaluate(sample_points[p]);
    }
    for (double eps : eps_list) {
        double sup = 0.0;
        for (std::size_t p = 0; p < sample_points.size(); ++p) {
            sup = std::max(sup, std::abs(nonlocal_apply(f, sample_points[p], eps, kernel, rule) - target[p]));
        }
        report.eps.push_back(eps);
        report.sup_errors.push_back(sup);
    }
    report.slope = report.eps.size() >= 2 ? loglog_slope(report.eps, report.sup_errors)
                                          : std::numeric_limits<double>::quiet_NaN();

    std::vector<std::size_t> order(report.eps.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return report.eps[a] > report.eps[b]; });
    report.monotone_decreasing = true;
    for (std::size_t i = 1; i < order.size(); ++i) {
        if (!(report.sup_errors[order[i]] < report.sup_errors[order[i - 1]])) {
            report.monotone_decreasing = false;
        }
    }
    return report;
}

// --- integral equation ----------------------------------------------------

std::vector<GridField> integral_equation_solve(const GridField& u0, double eps, const Kernel& kernel, double T,
                                               Coupling coupling, const IntegralSolveOptions& options)
{
    if (!u0.grid || u0.values.size() != u0.grid->size()) {
        throw std::invalid_argument("integral_equation_solve: initial field does not match its grid");
    }
    if (!(T > 0.0) || !std::isfinite(T)) {
        throw std::invalid_argument("integral_equation_solve: T must be positive");
    }
    if (options.dt < 0.0) {
        throw std::invalid_argument("integral_equation_solve: dt must be positive");
    }
    const NonlocalOperator op(u0.grid, eps, kernel, options.max_degree);
    const double dt_cap = options.dt > 0.0 ? options.dt : std::min(0.05, 1.25 / op.spectral_radius());
    const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(T / dt_cap - 1e-9)));
    const double dt = T / static_cast<double>(steps);
    const std::size_t every = std::max<std::size_t>(1, options.sample_every);

    const std::size_t n = u0.values.size();
    std::vector<double> u = u0.values;
    std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
    std::vector<GridField> out;
    out.push_back(GridField{u0.grid, u, u0.t});
    for (std::size_t step = 1; step <= steps; ++step) {
        op.apply(u, coupling, k1);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + 0.5 * dt * k1[i];
        op.apply(tmp, coupling, k2);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + 0.5 * dt * k2[i];
        op.apply(tmp, coupling, k3);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + dt * k3[i];
        op.apply(tmp, coupling, k4);
        for (std::size_t i = 0; i < n; ++i) {
            u[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            if (!std::isfinite(u[i])) {
                std::ostringstream msg;
                msg << "integral_equation_solve: non-finite value at step " << step;
                throw NumericalError(msg.str());
            }
        }
        if (step % every == 0 || step == steps) {
            const double t = step == steps ? u0.t + T : u0.t + static_cast<double>(step) * dt;
            out.push_back(GridField{u0.grid, u, t});
        }
    }
    return out;
}

}  // namespace sphkura
