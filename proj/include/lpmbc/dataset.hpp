#ifndef LPMBC_DATASET_HPP
#define LPMBC_DATASET_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lpmbc/rng.hpp"

namespace lpmbc {

// Labeled feature matrix, row-major. Labels are indices into class_names,
// which is ordered by first appearance so every downstream tie-break has a
// total order to work with.
struct Dataset {
    std::vector<double> features; // n * d, row-major
    std::vector<int> labels;      // length n, values in [0, c)
    std::vector<std::string> class_names;
    std::vector<std::string> feature_names;
    std::size_t n = 0;
    std::size_t d = 0;

    std::size_t num_classes() const { return class_names.size(); }

    std::span<const double> row(std::size_t i) const {
        return {features.data() + i * d, d};
    }
    std::span<double> row(std::size_t i) {
        return {features.data() + i * d, d};
    }

    std::vector<std::size_t> class_counts() const {
        std::vector<std::size_t> counts(num_classes(), 0);
        for (int l : labels) counts[static_cast<std::size_t>(l)]++;
        return counts;
    }

    std::size_t min_class_count() const {
        auto counts = class_counts();
        return *std::min_element(counts.begin(), counts.end());
    }

    // Validates the structural invariants; throws on violation.
    void check() const {
        if (n < 1 || d < 1)
            throw std::invalid_argument("dataset: need n >= 1 and d >= 1");
        if (features.size() != n * d)
            throw std::invalid_argument("dataset: feature buffer size mismatch");
        if (labels.size() != n)
            throw std::invalid_argument("dataset: label count mismatch");
        const int c = static_cast<int>(num_classes());
        std::vector<bool> seen(num_classes(), false);
        for (int l : labels) {
            if (l < 0 || l >= c)
                throw std::invalid_argument("dataset: label index out of range");
            seen[static_cast<std::size_t>(l)] = true;
        }
        for (bool s : seen)
            if (!s) throw std::invalid_argument("dataset: empty class");
        for (double v : features)
            if (!std::isfinite(v))
                throw std::invalid_argument("dataset: non-finite feature value");
    }

    Dataset subset(const std::vector<std::size_t>& idx) const {
        Dataset out;
        out.d = d;
        out.n = idx.size();
        out.class_names = class_names;
        out.feature_names = feature_names;
        out.features.reserve(out.n * d);
        out.labels.reserve(out.n);
        for (std::size_t i : idx) {
            auto r = row(i);
            out.features.insert(out.features.end(), r.begin(), r.end());
            out.labels.push_back(labels[i]);
        }
        return out;
    }
};

// Per-feature shift/scale fitted on a training split. Population (1/n)
// standard deviation; constant features get stddev 1 so scaling reduces to
// a shift.
struct Scaler {
    std::vector<double> means;
    std::vector<double> stddevs;

    std::size_t dim() const { return means.size(); }
};

inline Scaler fit_scaler(const Dataset& train) {
    if (train.n == 0 || train.d == 0)
        throw std::invalid_argument("fit_scaler: empty dataset");
    Scaler s;
    s.means.assign(train.d, 0.0);
    s.stddevs.assign(train.d, 0.0);
    for (std::size_t i = 0; i < train.n; ++i) {
        auto r = train.row(i);
        for (std::size_t j = 0; j < train.d; ++j) s.means[j] += r[j];
    }
    for (double& m : s.means) m /= static_cast<double>(train.n);
    for (std::size_t i = 0; i < train.n; ++i) {
        auto r = train.row(i);
        for (std::size_t j = 0; j < train.d; ++j) {
            double dev = r[j] - s.means[j];
            s.stddevs[j] += dev * dev;
        }
    }
    for (double& v : s.stddevs) {
        v = std::sqrt(v / static_cast<double>(train.n));
        if (v < 1e-12) v = 1.0;
    }
    return s;
}

inline Dataset apply_scaler(const Scaler& scaler, const Dataset& data) {
    if (data.d != scaler.dim())
        throw std::invalid_argument("apply_scaler: dimension mismatch");
    Dataset out = data;
    for (std::size_t i = 0; i < out.n; ++i) {
        auto r = out.row(i);
        for (std::size_t j = 0; j < out.d; ++j)
            r[j] = (r[j] - scaler.means[j]) / scaler.stddevs[j];
    }
    return out;
}

inline std::vector<double> apply_scaler(const Scaler& scaler,
                                        std::span<const double> x) {
    if (x.size() != scaler.dim())
        throw std::invalid_argument("apply_scaler: dimension mismatch");
    std::vector<double> out(x.size());
    for (std::size_t j = 0; j < x.size(); ++j)
        out[j] = (x[j] - scaler.means[j]) / scaler.stddevs[j];
    return out;
}

// Stratified partition into `folds` disjoint index sets. Per-class counts
// across folds differ by at most one. Classes with fewer samples than folds
// are distributed round-robin and a warning is recorded.
inline std::vector<std::vector<std::size_t>> stratified_folds(
    const Dataset& data, std::size_t folds, Rng& rng,
    std::vector<std::string>* warnings = nullptr) {
    if (folds < 2)
        throw std::invalid_argument("stratified_folds: need folds >= 2");
    std::vector<std::vector<std::size_t>> per_class(data.num_classes());
    for (std::size_t i = 0; i < data.n; ++i)
        per_class[static_cast<std::size_t>(data.labels[i])].push_back(i);

    std::vector<std::vector<std::size_t>> out(folds);
    std::size_t start = 0; // rotates so overall fold sizes stay balanced
    for (std::size_t c = 0; c < per_class.size(); ++c) {
        auto& idx = per_class[c];
        if (idx.size() < folds && warnings)
            warnings->push_back("class '" + data.class_names[c] +
                                "' has fewer samples than folds; distributed round-robin");
        rng.shuffle(idx);
        for (std::size_t i = 0; i < idx.size(); ++i)
            out[(start + i) % folds].push_back(idx[i]);
        start = (start + idx.size()) % folds;
    }
    for (auto& f : out) std::sort(f.begin(), f.end());
    return out;
}

} // namespace lpmbc

#endif
