#ifndef LPMBC_LPM_HPP
#define LPMBC_LPM_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lpmbc/neighborhood.hpp"

namespace lpmbc {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kLog2Pi = 1.8378770664093454835606594728112;
// Region integrals below this are treated as numerically empty.
inline constexpr double kLogNormalizerFloor = -690.77552789821368; // ln(1e-300)

// Standard normal CDF via the complementary error function:
//   Phi(z) = erfc(-z / sqrt(2)) / 2
// std::erfc is accurate to well under 1e-7 absolute over the whole line and
// keeps precision in the right tail, which the interval probabilities below
// rely on.
inline double std_normal_cdf(double z) {
    return 0.5 * std::erfc(-z * 0.70710678118654752440);
}

// P(lo <= Z <= hi) for standard normal Z, evaluated in whichever tail keeps
// the subtraction well conditioned.
inline double normal_interval_prob(double lo, double hi) {
    if (lo > hi) return 0.0;
    if (lo > 0.0)
        return std_normal_cdf(-lo) - std_normal_cdf(-hi);
    return std_normal_cdf(hi) - std_normal_cdf(lo);
}

inline double log_sum_exp(std::span<const double> v) {
    double mx = kNegInf;
    for (double x : v) mx = std::max(mx, x);
    if (std::isinf(mx) && mx < 0) return kNegInf;
    double s = 0.0;
    for (double x : v) s += std::exp(x - mx);
    return mx + std::log(s);
}

enum class AssumptionKind { LUA, LGA, LCA };
enum class BandwidthRule { unit, silverman };

struct Assumption {
    AssumptionKind kind = AssumptionKind::LUA;
    BandwidthRule bandwidth_rule = BandwidthRule::unit; // LCA only
    // LGA override used by the local-mean specialization: all per-feature
    // variances fixed to 1 instead of fitted.
    bool identity_variance = false;

    // Complexity order LUA < LGA < LCA, used for tie-breaking in selection.
    int rank() const { return static_cast<int>(kind); }

    static Assumption lua() { return {AssumptionKind::LUA}; }
    static Assumption lga() { return {AssumptionKind::LGA}; }
    static Assumption lga_identity() { return {AssumptionKind::LGA, BandwidthRule::unit, true}; }
    static Assumption lca(BandwidthRule rule = BandwidthRule::unit) {
        return {AssumptionKind::LCA, rule};
    }
};

inline std::string to_string(const Assumption& a) {
    switch (a.kind) {
    case AssumptionKind::LUA: return "lua";
    case AssumptionKind::LGA: return a.identity_variance ? "lga-identity" : "lga";
    case AssumptionKind::LCA:
        return a.bandwidth_rule == BandwidthRule::unit ? "lca-unit" : "lca-silverman";
    }
    return "?";
}

// A fitted local probabilistic model: one assumption, one region, one class.
// Densities are handled in log space throughout; (2r)^d and d-fold products
// underflow long before d reaches the benchmark dimensionalities.
struct LocalModel {
    Assumption assumption;
    Region region;
    int class_index = -1;
    std::size_t k_members = 0;

    // LGA
    std::vector<double> mu;
    std::vector<double> sigma2;

    // LCA
    std::vector<std::vector<double>> points;
    std::vector<double> bandwidth;
};

inline constexpr double kVarianceFloor = 1e-6;
inline constexpr double kBandwidthFloor = 1e-3;

inline LocalModel fit(const Assumption& assumption, const Region& region,
                      const Dataset& train,
                      const std::vector<std::size_t>& members,
                      int class_index = -1) {
    if (members.empty())
        throw std::invalid_argument("fit: empty member list");
    if (assumption.kind == AssumptionKind::LUA && region.is_global())
        throw std::invalid_argument("fit: LUA requires a finite region");

    LocalModel m;
    m.assumption = assumption;
    m.region = region;
    m.class_index = class_index;
    m.k_members = members.size();
    const std::size_t d = region.dim();
    const double k = static_cast<double>(members.size());

    if (assumption.kind == AssumptionKind::LGA) {
        m.mu.assign(d, 0.0);
        m.sigma2.assign(d, 0.0);
        for (std::size_t i : members) {
            auto r = train.row(i);
            for (std::size_t j = 0; j < d; ++j) m.mu[j] += r[j];
        }
        for (double& v : m.mu) v /= k;
        if (assumption.identity_variance) {
            m.sigma2.assign(d, 1.0);
        } else {
            for (std::size_t i : members) {
                auto r = train.row(i);
                for (std::size_t j = 0; j < d; ++j) {
                    double dev = r[j] - m.mu[j];
                    m.sigma2[j] += dev * dev;
                }
            }
            for (double& v : m.sigma2) v = std::max(v / k, kVarianceFloor);
        }
    } else if (assumption.kind == AssumptionKind::LCA) {
        m.points.reserve(members.size());
        for (std::size_t i : members) {
            auto r = train.row(i);
            m.points.emplace_back(r.begin(), r.end());
        }
        if (assumption.bandwidth_rule == BandwidthRule::unit) {
            m.bandwidth.assign(d, 1.0);
        } else {
            // Silverman per feature: 1.06 * sigma_j * k^(-1/5).
            std::vector<double> mean(d, 0.0), var(d, 0.0);
            for (const auto& p : m.points)
                for (std::size_t j = 0; j < d; ++j) mean[j] += p[j];
            for (double& v : mean) v /= k;
            for (const auto& p : m.points)
                for (std::size_t j = 0; j < d; ++j) {
                    double dev = p[j] - mean[j];
                    var[j] += dev * dev;
                }
            m.bandwidth.resize(d);
            const double kpow = std::pow(k, -0.2);
            for (std::size_t j = 0; j < d; ++j) {
                double sigma = std::sqrt(std::max(var[j] / k, kVarianceFloor));
                m.bandwidth[j] = std::max(1.06 * sigma * kpow, kBandwidthFloor);
            }
        }
    }
    return m;
}

namespace detail {

// log integral over the region of the unnormalized model density; exactly 0
// for global regions.
inline double log_region_integral(const LocalModel& m) {
    if (m.region.is_global()) return 0.0;
    const std::size_t d = m.region.dim();
    switch (m.assumption.kind) {
    case AssumptionKind::LUA:
        return 0.0; // LUA is defined directly as 1/V(R); nothing to normalize
    case AssumptionKind::LGA: {
        double lg = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            double s = std::sqrt(m.sigma2[j]);
            double p = normal_interval_prob((m.region.lo(j) - m.mu[j]) / s,
                                            (m.region.hi(j) - m.mu[j]) / s);
            lg += std::log(p); // -inf when the mass underflows
        }
        return lg;
    }
    case AssumptionKind::LCA: {
        std::vector<double> terms;
        terms.reserve(m.points.size());
        for (const auto& p : m.points) {
            double lg = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                double q = normal_interval_prob(
                    (m.region.lo(j) - p[j]) / m.bandwidth[j],
                    (m.region.hi(j) - p[j]) / m.bandwidth[j]);
                lg += std::log(q);
            }
            terms.push_back(lg);
        }
        return log_sum_exp(terms) - std::log(static_cast<double>(m.points.size()));
    }
    }
    return kNegInf;
}

inline double log_unnormalized_density(const LocalModel& m,
                                       std::span<const double> x) {
    const std::size_t d = m.region.dim();
    switch (m.assumption.kind) {
    case AssumptionKind::LUA:
        return -m.region.log_volume();
    case AssumptionKind::LGA: {
        double lp = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            double dev = x[j] - m.mu[j];
            lp += -0.5 * (kLog2Pi + std::log(m.sigma2[j])) -
                  0.5 * dev * dev / m.sigma2[j];
        }
        return lp;
    }
    case AssumptionKind::LCA: {
        std::vector<double> terms;
        terms.reserve(m.points.size());
        double log_h = 0.0;
        for (double h : m.bandwidth) log_h += std::log(h);
        for (const auto& p : m.points) {
            double e = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                double z = (x[j] - p[j]) / m.bandwidth[j];
                e += -0.5 * z * z;
            }
            terms.push_back(e);
        }
        return log_sum_exp(terms) - std::log(static_cast<double>(m.points.size())) -
               log_h - 0.5 * static_cast<double>(d) * kLog2Pi;
    }
    }
    return kNegInf;
}

} // namespace detail

// Log local probability density at x: the model density normalized to
// integrate to 1 over the region; -inf outside the region or when the
// region integral is numerically empty.
inline double log_lpd(const LocalModel& m, std::span<const double> x) {
    if (x.size() != m.region.dim())
        throw std::invalid_argument("log_lpd: dimension mismatch");
    if (!m.region.contains(x)) return kNegInf;
    if (m.assumption.kind == AssumptionKind::LUA)
        return -m.region.log_volume();
    double log_norm = detail::log_region_integral(m);
    if (log_norm < kLogNormalizerFloor) return kNegInf;
    return detail::log_unnormalized_density(m, x) - log_norm;
}

// Brute-force check of local independence: given a discrete joint table
// that factorizes over the full grid, verify the conditional table on an
// axis-aligned index box factorizes too (cell-by-cell, tolerance 1e-9).
struct IndexBox {
    std::size_t row_lo, row_hi; // inclusive
    std::size_t col_lo, col_hi; // inclusive
};

inline bool verify_local_independence(const std::vector<std::vector<double>>& joint,
                                      const IndexBox& box) {
    const std::size_t rows = joint.size();
    if (rows == 0) throw std::invalid_argument("verify_local_independence: empty table");
    const std::size_t cols = joint[0].size();
    double total = 0.0;
    for (const auto& r : joint) {
        if (r.size() != cols)
            throw std::invalid_argument("verify_local_independence: ragged table");
        for (double v : r) {
            if (v < 0.0) throw std::invalid_argument("verify_local_independence: negative entry");
            total += v;
        }
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw std::invalid_argument("verify_local_independence: table does not sum to 1");
    if (box.row_hi >= rows || box.col_hi >= cols || box.row_lo > box.row_hi ||
        box.col_lo > box.col_hi)
        throw std::invalid_argument("verify_local_independence: box out of range");

    double mass = 0.0;
    for (std::size_t i = box.row_lo; i <= box.row_hi; ++i)
        for (std::size_t j = box.col_lo; j <= box.col_hi; ++j)
            mass += joint[i][j];
    if (mass <= 0.0)
        throw std::domain_error("verify_local_independence: conditioning on null event");

    const std::size_t br = box.row_hi - box.row_lo + 1;
    const std::size_t bc = box.col_hi - box.col_lo + 1;
    std::vector<double> row_marg(br, 0.0), col_marg(bc, 0.0);
    for (std::size_t i = 0; i < br; ++i)
        for (std::size_t j = 0; j < bc; ++j) {
            double p = joint[box.row_lo + i][box.col_lo + j] / mass;
            row_marg[i] += p;
            col_marg[j] += p;
        }
    for (std::size_t i = 0; i < br; ++i)
        for (std::size_t j = 0; j < bc; ++j) {
            double p = joint[box.row_lo + i][box.col_lo + j] / mass;
            if (std::abs(p - row_marg[i] * col_marg[j]) > 1e-9) return false;
        }
    return true;
}

} // namespace lpmbc

#endif
