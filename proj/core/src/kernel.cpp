#include "sphkura/kernel.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace sphkura {

Kernel Kernel::indicator()
{
    return Kernel(KernelKind::Indicator, {});
}

Kernel Kernel::smooth_bump()
{
    return Kernel(KernelKind::SmoothBump, {});
}

Kernel Kernel::custom(std::vector<double> table)
{
    if (table.size() < 2) {
        throw std::invalid_argument("custom kernel: table needs at least two values");
    }
    for (std::size_t i = 0; i < table.size(); ++i) {
        const double v = table[i];
        if (!std::isfinite(v) || v < 0.0) {
            throw std::invalid_argument("custom kernel: values must be finite and non-negative");
        }
        if (i + 1 < table.size() && !(v > 0.0)) {
            throw std::invalid_argument("custom kernel: K must be positive on [0, 1)");
        }
    }
    return Kernel(KernelKind::Custom, std::move(table));
}

Kernel Kernel::parse(std::string_view spec)
{
    if (spec == "indicator") {
        return indicator();
    }
    if (spec == "smooth" || spec == "smooth_bump") {
        return smooth_bump();
    }
    constexpr std::string_view prefix = "custom:";
    if (spec.starts_with(prefix)) {
        std::vector<double> table;
        std::string_view rest = spec.substr(prefix.size());
        while (!rest.empty()) {
            const auto comma = rest.find(',');
            const std::string item(rest.substr(0, comma));
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(item, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != item.size() || item.empty()) {
                throw std::invalid_argument("custom kernel: cannot parse value '" + item + "'");
            }
            table.push_back(v);
            if (comma == std::string_view::npos) {
                break;
            }
            rest.remove_prefix(comma + 1);
        }
        return custom(std::move(table));
    }
    throw std::invalid_argument("unknown kernel '" + std::string(spec) +
                                "' (expected indicator, smooth or custom:v0,v1,...)");
}

std::string Kernel::name() const
{
    switch (kind_) {
    case KernelKind::Indicator: return "indicator";
    case KernelKind::SmoothBump: return "smooth_bump";
    case KernelKind::Custom: return "custom";
    }
    return "unknown";
}

std::string Kernel::spec() const
{
    if (kind_ != KernelKind::Custom) {
        return name();
    }
    std::string out = "custom:";
    char buf[32];
    for (std::size_t i = 0; i < table_.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", table_[i]);
        out += (i ? "," : "");
        out += buf;
    }
    return out;
}

double Kernel::profile(double r) const noexcept
{
    switch (kind_) {
    case KernelKind::Indicator: return 1.0;
    case KernelKind::SmoothBump: return (1.0 - r) * (1.0 - r);
    case KernelKind::Custom: {
        const double pos = r * static_cast<double>(table_.size() - 1);
        const auto i = static_cast<std::size_t>(pos);
        if (i + 1 >= table_.size()) {
            return table_.back();
        }
        const double frac = pos - static_cast<double>(i);
        return table_[i] + frac * (table_[i + 1] - table_[i]);
    }
    }
    return 0.0;
}

std::vector<double> Kernel::breakpoints() const
{
    if (kind_ != KernelKind::Custom) {
        return {0.0, 1.0};
    }
    std::vector<double> out;
    const std::size_t segments = table_.size() - 1;
    for (std::size_t i = 0; i <= segments; ++i) {
        out.push_back(static_cast<double>(i) / static_cast<double>(segments));
    }
    return out;
}

}  // namespace sphkura
