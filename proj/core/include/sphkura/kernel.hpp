#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace sphkura {

enum class KernelKind { Indicator, SmoothBump, Custom };

/// Radial interaction profile K : [0, inf) -> [0, inf), evaluated at the
/// ratio |x_i - x_j|^2 / eps. Supported on [0, 1) and positive there.
class Kernel {
public:
    /// K = 1 on [0, 1).
    static Kernel indicator();
    /// K(r) = (1 - r)^2 on [0, 1].
    static Kernel smooth_bump();
    /// Piecewise-linear profile through `table` at equally spaced r in [0, 1].
    /// Every entry except the last must be strictly positive and finite.
    static Kernel custom(std::vector<double> table);

    /// Parses "indicator", "smooth" / "smooth_bump", or "custom:v0,v1,...".
    static Kernel parse(std::string_view spec);

    KernelKind kind() const noexcept { return kind_; }
    std::string name() const;
    /// Round-trips through parse().
    std::string spec() const;
    const std::vector<double>& table() const noexcept { return table_; }

    /// K(r); zero for r >= 1.
    double operator()(double r) const noexcept
    {
        return r < 1.0 && r >= 0.0 ? profile(r) : 0.0;
    }

    /// The profile on the closed interval [0, 1], i.e. the continuous
    /// extension used by quadrature rules that touch r = 1.
    double profile(double r) const noexcept;

    /// Breakpoints in [0, 1] where the profile is not smooth (always includes
    /// the endpoints).
    std::vector<double> breakpoints() const;

private:
    Kernel(KernelKind kind, std::vector<double> table) : kind_(kind), table_(std::move(table)) {}

    KernelKind kind_;
    std::vector<double> table_;
};

}  // namespace sphkura
