#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "sphkura/kernel.hpp"
#include "sphkura/sphere.hpp"

namespace sphkura {

/// Immutable weighted eps-neighborhood graph on a point cloud.
///
/// Node i is adjacent to j != i iff |x_i - x_j|^2 < eps, with weight
/// K(|x_i - x_j|^2 / eps). Rows are stored in CSR form with neighbor indices
/// ascending; each undirected edge appears once in each endpoint's row with a
/// bitwise identical weight.
class SphereGraph {
public:
    /// Validates and assembles a graph from raw CSR arrays. Used by the loader;
    /// build_rgg is the normal entry point.
    static SphereGraph from_parts(PointCloud cloud, double eps, Kernel kernel,
                                  std::vector<std::uint64_t> offsets,
                                  std::vector<std::uint32_t> neighbors,
                                  std::vector<double> weights);

    std::size_t size() const noexcept { return cloud_.size(); }
    std::size_t directed_edge_count() const noexcept { return neighbors_.size(); }

    const PointCloud& cloud() const noexcept { return cloud_; }
    const UnitVec3& point(std::size_t i) const { return cloud_.points[i]; }
    double eps() const noexcept { return eps_; }
    const Kernel& kernel() const noexcept { return kernel_; }

    std::size_t degree(std::size_t i) const { return offsets_[i + 1] - offsets_[i]; }
    std::span<const std::uint32_t> neighbors(std::size_t i) const
    {
        return {neighbors_.data() + offsets_[i], degree(i)};
    }
    std::span<const double> weights(std::size_t i) const
    {
        return {weights_.data() + offsets_[i], degree(i)};
    }

    const std::vector<std::uint64_t>& offsets() const noexcept { return offsets_; }
    const std::vector<std::uint32_t>& neighbor_array() const noexcept { return neighbors_; }
    const std::vector<double>& weight_array() const noexcept { return weights_; }

    /// (n - 1) * eps / 4.
    double expected_degree() const noexcept { return expected_degree_; }
    /// 1 / (eps * expected_degree), or 0 for a single node.
    double norm_factor() const noexcept { return norm_factor_; }

    /// Largest weighted row sum norm_factor * sum_j w_ij.
    double max_coupling() const noexcept;

private:
    SphereGraph() = default;

    PointCloud cloud_;
    double eps_ = 0.0;
    Kernel kernel_ = Kernel::indicator();
    std::vector<std::uint64_t> offsets_;
    std::vector<std::uint32_t> neighbors_;
    std::vector<double> weights_;
    double expected_degree_ = 0.0;
    double norm_factor_ = 0.0;
};

/// Builds the graph with a latitude-band / longitude-cell spatial hash.
/// Requires 0 < eps <= 4 (eps = 4 is the complete graph up to antipodal ties)
/// and a non-empty cloud; throws std::invalid_argument otherwise.
SphereGraph build_rgg(const PointCloud& cloud, double eps, const Kernel& kernel, unsigned threads = 0);

/// (n - 1) * eps / 4: the mean number of neighbors of a node.
double expected_degree(std::size_t n, double eps) noexcept;

struct DegreeStats {
    std::size_t min = 0;
    std::size_t max = 0;
    double mean = 0.0;
    double stddev = 0.0;
    double expected = 0.0;
    std::vector<std::size_t> degrees;

    /// Fraction of nodes with |N_i - E N| > delta * E N.
    double fraction_outside(double delta) const;
};

DegreeStats degree_stats(const SphereGraph& g);

/// 2 exp(-3 delta^2 E / (2 delta + 6)). Not capped; clamp to 1 when reporting
/// it as a probability. Throws on delta <= 0 or expected < 0.
double bernstein_bound(double delta, double expected);

/// BFS reachability from node 0, ignoring weights.
bool is_connected(const SphereGraph& g);

/// Number of connected components.
std::size_t component_count(const SphereGraph& g);

/// max over edges of |v_i - v_j| / |x_i - x_j|.
double lipschitz_estimate(std::span<const double> values, const SphereGraph& g);

// --- serialization --------------------------------------------------------

void write_graph(std::ostream& os, const SphereGraph& g);
SphereGraph read_graph(std::istream& is);
void save_graph(const std::string& path, const SphereGraph& g);
SphereGraph load_graph(const std::string& path);

}  // namespace sphkura
