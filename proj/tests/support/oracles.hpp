// Independent oracles used by the unit, property, and acceptance suites.
// Everything here recomputes expected values by a different route than the
// library: brute-force scans, generic tensor quadrature, Monte Carlo, and a
// from-scratch naive Bayes. Nothing includes lpmbc internals beyond the
// public types they validate against.
#ifndef LPMBC_TESTS_ORACLES_HPP
#define LPMBC_TESTS_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "lpmbc/lpmbc.hpp"

namespace oracles {

// ---------------------------------------------------------------------------
// Quadrature

// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration on P_n.
inline void gauss_legendre(int n, std::vector<double>& nodes,
                           std::vector<double>& weights) {
    nodes.resize(static_cast<std::size_t>(n));
    weights.resize(static_cast<std::size_t>(n));
    const double pi = 3.14159265358979323846;
    for (int i = 0; i < n; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[static_cast<std::size_t>(i)] = x;
        weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
}

// Tensor-product Gauss-Legendre integral of f over an axis-aligned box.
// Intended for d <= 3.
inline double integrate_box(
    const std::function<double(std::span<const double>)>& f,
    const std::vector<double>& lo, const std::vector<double>& hi,
    int points_per_dim = 48) {
    const std::size_t d = lo.size();
    std::vector<double> nodes, weights;
    gauss_legendre(points_per_dim, nodes, weights);

    std::vector<std::size_t> idx(d, 0);
    std::vector<double> x(d);
    double total = 0.0;
    const auto npts = static_cast<std::size_t>(points_per_dim);
    while (true) {
        double w = 1.0;
        for (std::size_t j = 0; j < d; ++j) {
            double half = 0.5 * (hi[j] - lo[j]);
            x[j] = lo[j] + half * (nodes[idx[j]] + 1.0);
            w *= half * weights[idx[j]];
        }
        total += w * f(x);
        std::size_t j = 0;
        for (; j < d; ++j) {
            if (++idx[j] < npts) break;
            idx[j] = 0;
        }
        if (j == d) break;
    }
    return total;
}

struct McEstimate {
    double value = 0.0;
    double stderr_ = 0.0;
};

// Monte Carlo integral of f over a box with region-uniform samples.
inline McEstimate integrate_box_mc(
    const std::function<double(std::span<const double>)>& f,
    const std::vector<double>& lo, const std::vector<double>& hi,
    std::size_t samples, lpmbc::Rng& rng) {
    const std::size_t d = lo.size();
    double volume = 1.0;
    for (std::size_t j = 0; j < d; ++j) volume *= hi[j] - lo[j];
    std::vector<double> x(d);
    double sum = 0.0, sumsq = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        for (std::size_t j = 0; j < d; ++j)
            x[j] = lo[j] + (hi[j] - lo[j]) * rng.next_double();
        double v = f(x);
        sum += v;
        sumsq += v * v;
    }
    double mean = sum / static_cast<double>(samples);
    double var = sumsq / static_cast<double>(samples) - mean * mean;
    McEstimate est;
    est.value = volume * mean;
    est.stderr_ = volume * std::sqrt(std::max(var, 0.0) / static_cast<double>(samples));
    return est;
}

// High-precision standard normal CDF via the Taylor series of erf around 0,
// valid to ~1e-14 for |z| <= 6; falls back to saturation beyond.
inline double phi_series(double z) {
    if (z > 8.0) return 1.0;
    if (z < -8.0) return 0.0;
    const double t = z / std::sqrt(2.0);
    double term = t, sum = t;
    for (int n = 1; n < 200; ++n) {
        term *= -t * t / n;
        double add = term / (2.0 * n + 1.0);
        sum += add;
        if (std::abs(add) < 1e-18) break;
    }
    double erf = 2.0 / std::sqrt(3.14159265358979323846) * sum;
    return 0.5 * (1.0 + erf);
}

// ---------------------------------------------------------------------------
// Brute-force neighbor search

inline std::vector<std::size_t> knn_indices(const lpmbc::Dataset& train,
                                            std::span<const double> q,
                                            std::size_t k, lpmbc::Metric metric) {
    std::vector<std::size_t> order(train.n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> dist(train.n);
    for (std::size_t i = 0; i < train.n; ++i)
        dist[i] = lpmbc::distance(metric, q, train.row(i));
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return dist[a] < dist[b]; });
    order.resize(k);
    return order;
}

// Majority vote over the k Chebychev-nearest neighbors; vote ties go to the
// lowest class index.
inline int voting_knn_label(const lpmbc::Dataset& train, std::span<const double> q,
                            std::size_t k) {
    auto nn = knn_indices(train, q, k, lpmbc::Metric::chebychev);
    std::vector<std::size_t> votes(train.num_classes(), 0);
    for (std::size_t i : nn) votes[static_cast<std::size_t>(train.labels[i])]++;
    return static_cast<int>(std::max_element(votes.begin(), votes.end()) -
                            votes.begin());
}

// Distance-weighted kNN: argmax_l sum over the k nearest of the Gaussian
// kernel K(x - x_i) restricted to class l.
inline int dw_knn_label(const lpmbc::Dataset& train, std::span<const double> q,
                        std::size_t k) {
    auto nn = knn_indices(train, q, k, lpmbc::Metric::chebychev);
    std::vector<double> weight(train.num_classes(), 0.0);
    for (std::size_t i : nn) {
        auto r = train.row(i);
        double sq = 0.0;
        for (std::size_t j = 0; j < train.d; ++j) {
            double dv = q[j] - r[j];
            sq += dv * dv;
        }
        weight[static_cast<std::size_t>(train.labels[i])] += std::exp(-0.5 * sq);
    }
    return static_cast<int>(std::max_element(weight.begin(), weight.end()) -
                            weight.begin());
}

// Local mean rule: per class, mean of its k Chebychev-nearest points;
// predict the class whose local center is Euclidean-closest.
inline int local_mean_label(const lpmbc::Dataset& train, std::span<const double> q,
                            std::size_t k) {
    const std::size_t c = train.num_classes();
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t cls = 0; cls < c; ++cls) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < train.n; ++i)
            if (train.labels[i] == static_cast<int>(cls)) idx.push_back(i);
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            return lpmbc::distance(lpmbc::Metric::chebychev, q, train.row(a)) <
                   lpmbc::distance(lpmbc::Metric::chebychev, q, train.row(b));
        });
        idx.resize(std::min(k, idx.size()));
        std::vector<double> mu(train.d, 0.0);
        for (std::size_t i : idx) {
            auto r = train.row(i);
            for (std::size_t j = 0; j < train.d; ++j) mu[j] += r[j];
        }
        for (double& v : mu) v /= static_cast<double>(idx.size());
        double sq = 0.0;
        for (std::size_t j = 0; j < train.d; ++j) {
            double dv = q[j] - mu[j];
            sq += dv * dv;
        }
        if (sq < best_d) {
            best_d = sq;
            best = static_cast<int>(cls);
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// From-scratch Gaussian naive Bayes (frequencies as priors, per-feature
// Gaussian likelihoods with population variance).

struct GnbResult {
    int label = 0;
    std::vector<double> posteriors;
};

inline GnbResult gaussian_nb(const lpmbc::Dataset& train, std::span<const double> q,
                             double variance_floor = 1e-6) {
    const std::size_t c = train.num_classes();
    std::vector<double> log_joint(c, 0.0);
    for (std::size_t cls = 0; cls < c; ++cls) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < train.n; ++i)
            if (train.labels[i] == static_cast<int>(cls)) idx.push_back(i);
        std::vector<double> mu(train.d, 0.0), var(train.d, 0.0);
        for (std::size_t i : idx) {
            auto r = train.row(i);
            for (std::size_t j = 0; j < train.d; ++j) mu[j] += r[j];
        }
        for (double& v : mu) v /= static_cast<double>(idx.size());
        for (std::size_t i : idx) {
            auto r = train.row(i);
            for (std::size_t j = 0; j < train.d; ++j) {
                double dev = r[j] - mu[j];
                var[j] += dev * dev;
            }
        }
        for (double& v : var) v = std::max(v / static_cast<double>(idx.size()),
                                           variance_floor);
        double lp = std::log(static_cast<double>(idx.size()) /
                             static_cast<double>(train.n));
        for (std::size_t j = 0; j < train.d; ++j) {
            double dev = q[j] - mu[j];
            lp += -0.5 * std::log(2.0 * 3.14159265358979323846 * var[j]) -
                  0.5 * dev * dev / var[j];
        }
        log_joint[cls] = lp;
    }
    GnbResult out;
    double mx = *std::max_element(log_joint.begin(), log_joint.end());
    double z = 0.0;
    for (double v : log_joint) z += std::exp(v - mx);
    out.posteriors.resize(c);
    for (std::size_t i = 0; i < c; ++i)
        out.posteriors[i] = std::exp(log_joint[i] - mx) / z;
    out.label = static_cast<int>(std::max_element(log_joint.begin(), log_joint.end()) -
                                 log_joint.begin());
    return out;
}

// ---------------------------------------------------------------------------
// Random instance generators

inline lpmbc::Dataset random_dataset(lpmbc::Rng& rng, std::size_t n_per_class,
                                     std::size_t d, std::size_t classes,
                                     double center_spread = 2.0) {
    lpmbc::Dataset ds;
    ds.d = d;
    ds.n = n_per_class * classes;
    for (std::size_t j = 0; j < d; ++j) ds.feature_names.push_back("f" + std::to_string(j));
    for (std::size_t cls = 0; cls < classes; ++cls) {
        ds.class_names.push_back("c" + std::to_string(cls));
        std::vector<double> center(d);
        for (double& v : center) v = center_spread * (2.0 * rng.next_double() - 1.0);
        for (std::size_t i = 0; i < n_per_class; ++i) {
            for (std::size_t j = 0; j < d; ++j)
                ds.features.push_back(center[j] + rng.next_normal());
            ds.labels.push_back(static_cast<int>(cls));
        }
    }
    return ds;
}

inline std::vector<double> random_query(lpmbc::Rng& rng, std::size_t d,
                                        double spread = 3.0) {
    std::vector<double> q(d);
    for (double& v : q) v = spread * (2.0 * rng.next_double() - 1.0);
    return q;
}

// Outer-product joint table from two random marginals.
inline std::vector<std::vector<double>> random_product_joint(lpmbc::Rng& rng,
                                                             std::size_t rows,
                                                             std::size_t cols) {
    std::vector<double> pr(rows), pc(cols);
    double sr = 0.0, sc = 0.0;
    for (double& v : pr) {
        v = 0.05 + rng.next_double();
        sr += v;
    }
    for (double& v : pc) {
        v = 0.05 + rng.next_double();
        sc += v;
    }
    std::vector<std::vector<double>> joint(rows, std::vector<double>(cols));
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j)
            joint[i][j] = (pr[i] / sr) * (pc[j] / sc);
    return joint;
}

// Diagonal-heavy joint: genuinely dependent.
inline std::vector<std::vector<double>> random_dependent_joint(lpmbc::Rng& rng,
                                                               std::size_t size) {
    auto joint = random_product_joint(rng, size, size);
    double extra = 0.0;
    for (std::size_t i = 0; i < size; ++i) {
        joint[i][i] += 1.0;
        extra += 1.0;
    }
    for (auto& row : joint)
        for (double& v : row) v /= (1.0 + extra);
    return joint;
}

} // namespace oracles

#endif
