#ifndef LPMBC_NEIGHBORHOOD_HPP
#define LPMBC_NEIGHBORHOOD_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lpmbc/dataset.hpp"

namespace lpmbc {

enum class Metric { chebychev, euclidean };

inline double distance(Metric metric, std::span<const double> a,
                       std::span<const double> b) {
    if (a.size() != b.size())
        throw std::invalid_argument("distance: dimension mismatch");
    if (metric == Metric::chebychev) {
        double m = 0.0;
        for (std::size_t j = 0; j < a.size(); ++j)
            m = std::max(m, std::abs(a[j] - b[j]));
        return m;
    }
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        double dv = a[j] - b[j];
        s += dv * dv;
    }
    return std::sqrt(s);
}

// Axis-aligned hypercube around a query point. An infinite radius marks the
// whole sample space (global neighborhoods).
struct Region {
    std::vector<double> center;
    double radius = 0.0;

    std::size_t dim() const { return center.size(); }
    bool is_global() const { return std::isinf(radius); }

    bool contains(std::span<const double> x) const {
        if (is_global()) return true;
        for (std::size_t j = 0; j < center.size(); ++j)
            if (std::abs(x[j] - center[j]) > radius) return false;
        return true;
    }

    // d * ln(2r); +inf for global regions.
    double log_volume() const {
        if (is_global()) return std::numeric_limits<double>::infinity();
        return static_cast<double>(dim()) * std::log(2.0 * radius);
    }

    double lo(std::size_t j) const { return center[j] - radius; }
    double hi(std::size_t j) const { return center[j] + radius; }
};

enum class NeighborhoodKind { per_class, shared, global };

struct NeighborhoodMode {
    NeighborhoodKind kind = NeighborhoodKind::per_class;
    std::size_t k = 1; // unused for global

    static NeighborhoodMode per_class(std::size_t k) { return {NeighborhoodKind::per_class, k}; }
    static NeighborhoodMode shared(std::size_t k) { return {NeighborhoodKind::shared, k}; }
    static NeighborhoodMode global() { return {NeighborhoodKind::global, 0}; }
};

// Duplicate points can give a zero k-th distance; flooring keeps the region
// volume positive without reordering anything.
inline constexpr double kRadiusFloor = 1e-9;

// Distance to the k-th nearest of `points` from `query` (1-based k),
// before flooring.
inline double kth_nearest_radius(const std::vector<std::span<const double>>& points,
                                 std::span<const double> query, std::size_t k,
                                 Metric metric) {
    if (k < 1 || k > points.size())
        throw std::invalid_argument("kth_nearest_radius: k out of range");
    std::vector<double> dists;
    dists.reserve(points.size());
    for (auto p : points) dists.push_back(distance(metric, query, p));
    std::nth_element(dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(k - 1),
                     dists.end());
    return dists[k - 1];
}

struct ClassRegion {
    Region region;
    std::vector<std::size_t> members; // training-set row indices, this class only
};

// One region (and its member rows) per class, per the selected mode.
// Membership is geometric: every point inside the closed hypercube counts,
// so ties at the k-th distance are all included.
inline std::vector<ClassRegion> build_regions(const Dataset& train,
                                              std::span<const double> query,
                                              NeighborhoodMode mode,
                                              Metric metric) {
    if (query.size() != train.d)
        throw std::invalid_argument("build_regions: query dimension mismatch");
    const std::size_t c = train.num_classes();
    std::vector<std::vector<std::size_t>> by_class(c);
    for (std::size_t i = 0; i < train.n; ++i)
        by_class[static_cast<std::size_t>(train.labels[i])].push_back(i);

    std::vector<ClassRegion> out(c);
    const double inf = std::numeric_limits<double>::infinity();

    auto collect_members = [&](std::size_t cls, double radius) {
        out[cls].members.clear();
        for (std::size_t i : by_class[cls])
            if (distance(metric, query, train.row(i)) <= radius)
                out[cls].members.push_back(i);
    };

    switch (mode.kind) {
    case NeighborhoodKind::global:
        for (std::size_t cls = 0; cls < c; ++cls) {
            out[cls].region = Region{{query.begin(), query.end()}, inf};
            out[cls].members = by_class[cls];
        }
        break;
    case NeighborhoodKind::per_class:
        for (std::size_t cls = 0; cls < c; ++cls) {
            if (mode.k > by_class[cls].size())
                throw std::invalid_argument(
                    "build_regions: k exceeds sample count of class '" +
                    train.class_names[cls] + "'");
            std::vector<std::span<const double>> pts;
            pts.reserve(by_class[cls].size());
            for (std::size_t i : by_class[cls]) pts.push_back(train.row(i));
            double r = kth_nearest_radius(pts, query, mode.k, metric);
            r = std::max(r, kRadiusFloor);
            out[cls].region = Region{{query.begin(), query.end()}, r};
            collect_members(cls, r);
        }
        break;
    case NeighborhoodKind::shared: {
        if (mode.k > train.n)
            throw std::invalid_argument("build_regions: k exceeds training size");
        std::vector<std::span<const double>> pts;
        pts.reserve(train.n);
        for (std::size_t i = 0; i < train.n; ++i) pts.push_back(train.row(i));
        double r = kth_nearest_radius(pts, query, mode.k, metric);
        r = std::max(r, kRadiusFloor);
        for (std::size_t cls = 0; cls < c; ++cls) {
            out[cls].region = Region{{query.begin(), query.end()}, r};
            collect_members(cls, r);
        }
        break;
    }
    }
    return out;
}

} // namespace lpmbc

#endif
