#include "sphkura/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

#include "sphkura/parallel.hpp"

namespace sphkura {

namespace {

constexpr double kPi = std::numbers::pi;

/// Latitude bands of roughly equal angular height, each split into longitude
/// cells whose arc length is at least the cell scale. Bands touching a pole
/// are a single cell.
class BandIndex {
public:
    BandIndex(const PointCloud& cloud, double search_radius)
        : radius_(search_radius)
    {
        const std::size_t n = cloud.size();
        const double cell_scale = std::max(search_radius, std::sqrt(4.0 * kPi / static_cast<double>(std::max<std::size_t>(n, 1))));
        bands_ = static_cast<std::size_t>(std::clamp(std::floor(kPi / cell_scale), 1.0, 32768.0));
        band_height_ = kPi / static_cast<double>(bands_);

        cells_.resize(bands_);
        band_base_.resize(bands_ + 1, 0);
        for (std::size_t b = 0; b < bands_; ++b) {
            std::size_t nc = 1;
            if (b != 0 && b + 1 != bands_) {
                const double sin_min = std::min(std::sin(b * band_height_), std::sin((b + 1) * band_height_));
                nc = static_cast<std::size_t>(std::clamp(std::floor(2.0 * kPi * sin_min / cell_scale), 1.0, 65536.0));
            }
            cells_[b] = nc;
            band_base_[b + 1] = band_base_[b] + nc;
        }

        theta_.resize(n);
        phi_.resize(n);
        std::vector<std::size_t> cell_of(n);
        std::vector<std::size_t> counts(band_base_.back() + 1, 0);
        for (std::size_t i = 0; i < n; ++i) {
            theta_[i] = cloud.points[i].theta();
            phi_[i] = cloud.points[i].phi();
            const std::size_t b = band_of(theta_[i]);
            cell_of[i] = band_base_[b] + cell_in_band(b, phi_[i]);
            ++counts[cell_of[i] + 1];
        }
        std::partial_sum(counts.begin(), counts.end(), counts.begin());
        cell_start_ = counts;
        members_.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            members_[counts[cell_of[i]]++] = static_cast<std::uint32_t>(i);
        }
    }

    /// Calls visit(j) for every point that may lie within the search radius
    /// of point i (a superset of the true neighbors).
    template <class Visit>
    void for_candidates(std::size_t i, Visit&& visit) const
    {
        const double theta = theta_[i];
        const double phi = phi_[i];
        const double lo = theta - radius_;
        const double hi = theta + radius_;
        const std::size_t b_lo = band_of(std::max(lo, 0.0));
        const std::size_t b_hi = band_of(std::min(hi, kPi));

        // Longitude half-window; unbounded when the cap reaches a pole.
        double half = kPi;
        if (lo > 0.0 && hi < kPi) {
            const double ratio = std::sin(radius_) / std::sin(theta);
            if (ratio < 1.0) {
                half = std::asin(ratio) * (1.0 + 1e-9) + 1e-12;
            }
        }

        for (std::size_t b = b_lo; b <= b_hi; ++b) {
            const std::size_t nc = cells_[b];
            const double width = 2.0 * kPi / static_cast<double>(nc);
            const auto c_lo = static_cast<long long>(std::floor((phi - half) / width));
            const auto c_hi = static_cast<long long>(std::floor((phi + half) / width));
            if (half >= kPi || c_hi - c_lo + 1 >= static_cast<long long>(nc)) {
                visit_range(band_base_[b], band_base_[b] + nc, visit);
                continue;
            }
            for (long long c = c_lo; c <= c_hi; ++c) {
                const auto wrapped = static_cast<std::size_t>(((c % static_cast<long long>(nc)) + static_cast<long long>(nc)) %
                                                              static_cast<long long>(nc));
                const std::size_t cell = band_base_[b] + wrapped;
                visit_range(cell, cell + 1, visit);
            }
        }
    }

private:
    std::size_t band_of(double theta) const noexcept
    {
        const auto b = static_cast<std::size_t>(std::max(0.0, theta / band_height_));
        return std::min(b, bands_ - 1);
    }

    std::size_t cell_in_band(std::size_t b, double phi) const noexcept
    {
        const std::size_t nc = cells_[b];
        const auto c = static_cast<std::size_t>(std::max(0.0, phi / (2.0 * kPi) * static_cast<double>(nc)));
        return std::min(c, nc - 1);
    }

    template <class Visit>
    void visit_range(std::size_t cell_begin, std::size_t cell_end, Visit& visit) const
    {
        for (std::size_t k = cell_start_[cell_begin]; k < cell_start_[cell_end]; ++k) {
            visit(members_[k]);
        }
    }

    double radius_;
    std::size_t bands_ = 1;
    double band_height_ = kPi;
    std::vector<std::size_t> cells_;
    std::vector<std::size_t> band_base_;
    std::vector<std::size_t> cell_start_;
    std::vector<std::uint32_t> members_;
    std::vector<double> theta_;
    std::vector<double> phi_;
};

void check_eps(double eps)
{
    if (!(eps > 0.0 && eps <= 4.0)) {
        throw std::invalid_argument("eps must lie in (0, 4], got " + std::to_string(eps));
    }
}

}  // namespace

SphereGraph SphereGraph::from_parts(PointCloud cloud, double eps, Kernel kernel,
                                    std::vector<std::uint64_t> offsets,
                                    std::vector<std::uint32_t> neighbors,
                                    std::vector<double> weights)
{
    check_eps(eps);
    const std::size_t n = cloud.size();
    if (offsets.size() != n + 1 || offsets.front() != 0 || offsets.back() != neighbors.size() ||
        weights.size() != neighbors.size()) {
        throw std::invalid_argument("SphereGraph: inconsistent CSR arrays");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (offsets[i] > offsets[i + 1]) {
            throw std::invalid_argument("SphereGraph: offsets must be non-decreasing");
        }
        for (std::uint64_t k = offsets[i]; k < offsets[i + 1]; ++k) {
            if (neighbors[k] >= n || neighbors[k] == i) {
                throw std::invalid_argument("SphereGraph: neighbor index out of range or self loop");
            }
        }
    }
    SphereGraph g;
    g.cloud_ = std::move(cloud);
    g.eps_ = eps;
    g.kernel_ = std::move(kernel);
    g.offsets_ = std::move(offsets);
    g.neighbors_ = std::move(neighbors);
    g.weights_ = std::move(weights);
    g.expected_degree_ = sphkura::expected_degree(n, eps);
    g.norm_factor_ = g.expected_degree_ > 0.0 ? 1.0 / (eps * g.expected_degree_) : 0.0;
    return g;
}

double SphereGraph::max_coupling() const noexcept
{
    double best = 0.0;
    for (std::size_t i = 0; i < size(); ++i) {
        double row = 0.0;
        for (double w : weights(i)) {
            row += w;
        }
        best = std::max(best, row);
    }
    return best * norm_factor_;
}

SphereGraph build_rgg(const PointCloud& cloud, double eps, const Kernel& kernel, unsigned threads)
{
    check_eps(eps);
    const std::size_t n = cloud.size();
    if (n == 0) {
        throw std::invalid_argument("build_rgg: empty point cloud");
    }
    if (n > std::numeric_limits<std::uint32_t>::max()) {
        throw std::invalid_argument("build_rgg: too many points");
    }

    const double radius = std::min(kPi, cap_geodesic_radius(eps) * (1.0 + 1e-9) + 1e-12);
    const BandIndex index(cloud, radius);

    std::vector<std::vector<std::uint32_t>> rows(n);
    parallel_for(n, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            auto& row = rows[i];
            const UnitVec3& xi = cloud.points[i];
            index.for_candidates(i, [&](std::uint32_t j) {
                if (j != i && euclid_dist2(xi, cloud.points[j]) < eps) {
                    row.push_back(j);
                }
            });
            std::sort(row.begin(), row.end());
        }
    });

    std::vector<std::uint64_t> offsets(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
        offsets[i + 1] = offsets[i] + rows[i].size();
    }
    std::vector<std::uint32_t> neighbors(offsets.back());
    std::vector<double> weights(offsets.back());
    parallel_for(n, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            std::uint64_t k = offsets[i];
            for (std::uint32_t j : rows[i]) {
                neighbors[k] = j;
                weights[k] = kernel(euclid_dist2(cloud.points[i], cloud.points[j]) / eps);
                ++k;
            }
            std::vector<std::uint32_t>().swap(rows[i]);
        }
    });
    return SphereGraph::from_parts(cloud, eps, kernel, std::move(offsets), std::move(neighbors), std::move(weights));
}

double expected_degree(std::size_t n, double eps) noexcept
{
    if (n <= 1) {
        return 0.0;
    }
    return static_cast<double>(n - 1) * eps / 4.0;
}

double DegreeStats::fraction_outside(double delta) const
{
    if (degrees.empty()) {
        return 0.0;
    }
    std::size_t outside = 0;
    for (std::size_t d : degrees) {
        if (std::abs(static_cast<double>(d) - expected) > delta * expected) {
            ++outside;
        }
    }
    return static_cast<double>(outside) / static_cast<double>(degrees.size());
}

DegreeStats degree_stats(const SphereGraph& g)
{
    DegreeStats s;
    const std::size_t n = g.size();
    s.expected = g.expected_degree();
    s.degrees.resize(n);
    if (n == 0) {
        return s;
    }
    s.min = std::numeric_limits<std::size_t>::max();
    std::size_t total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t d = g.degree(i);
        s.degrees[i] = d;
        s.min = std::min(s.min, d);
        s.max = std::max(s.max, d);
        total += d;
    }
    s.mean = static_cast<double>(total) / static_cast<double>(n);
    double var = 0.0;
    for (std::size_t d : s.degrees) {
        const double diff = static_cast<double>(d) - s.mean;
        var += diff * diff;
    }
    s.stddev = std::sqrt(var / static_cast<double>(n));
    return s;
}

double bernstein_bound(double delta, double expected)
{
    if (!(delta > 0.0) || !(expected >= 0.0)) {
        throw std::invalid_argument("bernstein_bound: need delta > 0 and expected >= 0");
    }
    return 2.0 * std::exp(-3.0 * delta * delta * expected / (2.0 * delta + 6.0));
}

namespace {

std::vector<std::uint32_t> component_labels(const SphereGraph& g, std::size_t& count)
{
    const std::size_t n = g.size();
    constexpr auto unset = std::numeric_limits<std::uint32_t>::max();
    std::vector<std::uint32_t> label(n, unset);
    std::vector<std::uint32_t> queue;
    queue.reserve(n);
    count = 0;
    for (std::size_t root = 0; root < n; ++root) {
        if (label[root] != unset) {
            continue;
        }
        const auto id = static_cast<std::uint32_t>(count++);
        label[root] = id;
        queue.clear();
        queue.push_back(static_cast<std::uint32_t>(root));
        for (std::size_t head = 0; head < queue.size(); ++head) {
            for (std::uint32_t j : g.neighbors(queue[head])) {
                if (label[j] == unset) {
                    label[j] = id;
                    queue.push_back(j);
                }
            }
        }
    }
    return label;
}

}  // namespace

bool is_connected(const SphereGraph& g)
{
    return component_count(g) <= 1;
}

std::size_t component_count(const SphereGraph& g)
{
    std::size_t count = 0;
    component_labels(g, count);
    return count;
}

double lipschitz_estimate(std::span<const double> values, const SphereGraph& g)
{
    if (values.size() != g.size()) {
        throw std::invalid_argument("lipschitz_estimate: values length does not match node count");
    }
    double best = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        for (std::uint32_t j : g.neighbors(i)) {
            if (j <= i) {
                continue;
            }
            const double d = std::sqrt(euclid_dist2(g.point(i), g.point(j)));
            if (d > 0.0) {
                best = std::max(best, std::abs(values[i] - values[j]) / d);
            }
        }
    }
    return best;
}

// --- serialization --------------------------------------------------------

namespace {

constexpr char kMagic[8] = {'S', 'P', 'H', 'K', 'R', 'G', 'G', '1'};

template <class T>
void put(std::ostream& os, const T& v)
{
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
void put_array(std::ostream& os, const std::vector<T>& v)
{
    os.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(T)));
}

template <class T>
T get(std::istream& is)
{
    T v{};
    if (!is.read(reinterpret_cast<char*>(&v), sizeof v)) {
        throw std::runtime_error("graph file truncated");
    }
    return v;
}

template <class T>
std::vector<T> get_array(std::istream& is, std::uint64_t count)
{
    std::vector<T> v(count);
    if (!is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(count * sizeof(T)))) {
        throw std::runtime_error("graph file truncated");
    }
    return v;
}

}  // namespace

void write_graph(std::ostream& os, const SphereGraph& g)
{
    os.write(kMagic, sizeof kMagic);
    put<std::uint64_t>(os, g.size());
    put<double>(os, g.eps());
    put<std::uint32_t>(os, static_cast<std::uint32_t>(g.kernel().kind()));
    put<std::uint64_t>(os, g.cloud().seed);
    const std::string kernel = g.kernel().spec();
    put<std::uint32_t>(os, static_cast<std::uint32_t>(kernel.size()));
    os.write(kernel.data(), static_cast<std::streamsize>(kernel.size()));
    put<std::uint64_t>(os, g.directed_edge_count());
    for (const auto& p : g.cloud().points) {
        put(os, p.x());
        put(os, p.y());
        put(os, p.z());
    }
    put_array(os, g.offsets());
    put_array(os, g.neighbor_array());
    put_array(os, g.weight_array());
}

SphereGraph read_graph(std::istream& is)
{
    char magic[sizeof kMagic];
    if (!is.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
        throw std::runtime_error("not a sphkura graph file");
    }
    const auto n = get<std::uint64_t>(is);
    const auto eps = get<double>(is);
    get<std::uint32_t>(is);  // kernel kind, redundant with the spec string
    const auto seed = get<std::uint64_t>(is);
    const auto kernel_len = get<std::uint32_t>(is);
    std::string kernel(kernel_len, '\0');
    if (!is.read(kernel.data(), kernel_len)) {
        throw std::runtime_error("graph file truncated");
    }
    const auto edges = get<std::uint64_t>(is);
    PointCloud cloud;
    cloud.seed = seed;
    cloud.points.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        const double x = get<double>(is);
        const double y = get<double>(is);
        const double z = get<double>(is);
        cloud.points.push_back(UnitVec3::from_unit(x, y, z));
    }
    auto offsets = get_array<std::uint64_t>(is, n + 1);
    auto neighbors = get_array<std::uint32_t>(is, edges);
    auto weights = get_array<double>(is, edges);
    return SphereGraph::from_parts(std::move(cloud), eps, Kernel::parse(kernel), std::move(offsets),
                                   std::move(neighbors), std::move(weights));
}

void save_graph(const std::string& path, const SphereGraph& g)
{
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        throw std::runtime_error("cannot open " + path + " for writing");
    }
    write_graph(os, g);
}

SphereGraph load_graph(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw std::runtime_error("cannot open " + path);
    }
    return read_graph(is);
}

}  // namespace sphkura
