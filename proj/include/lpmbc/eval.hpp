#ifndef LPMBC_EVAL_HPP
#define LPMBC_EVAL_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lpmbc/classifier.hpp"

namespace lpmbc {

inline double accuracy(const std::vector<int>& predictions,
                       const std::vector<int>& truth) {
    if (predictions.size() != truth.size() || truth.empty())
        throw std::invalid_argument("accuracy: length mismatch");
    std::size_t correct = 0;
    for (std::size_t i = 0; i < truth.size(); ++i)
        if (predictions[i] == truth[i]) ++correct;
    return static_cast<double>(correct) / static_cast<double>(truth.size());
}

// Multiclass Brier score divided by the class count:
//   (1/(n*c)) sum_i sum_l (1{l == truth_i} - P_i(l))^2
// Bounded in [0,1]; 0 for perfect one-hot predictions.
inline double mse(const std::vector<std::vector<double>>& posterior_rows,
                  const std::vector<int>& truth) {
    if (posterior_rows.size() != truth.size() || truth.empty())
        throw std::invalid_argument("mse: length mismatch");
    const std::size_t c = posterior_rows[0].size();
    double total = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const auto& row = posterior_rows[i];
        if (row.size() != c)
            throw std::invalid_argument("mse: ragged posterior rows");
        double sum = 0.0;
        for (double p : row) sum += p;
        if (std::abs(sum - 1.0) > 1e-6)
            throw std::invalid_argument("mse: posterior row does not sum to 1");
        for (std::size_t l = 0; l < c; ++l) {
            double target = (static_cast<int>(l) == truth[i]) ? 1.0 : 0.0;
            double dev = target - row[l];
            total += dev * dev;
        }
    }
    return total / (static_cast<double>(truth.size()) * static_cast<double>(c));
}

// Neighborhood sizes {1, 0.1*N_m, ..., 1.0*N_m} rounded to integers,
// deduplicated, clamped to [1, N_m].
struct SelectionGrid {
    std::vector<std::size_t> k_values;
    std::vector<Assumption> assumptions;

    static std::vector<std::size_t> k_grid(std::size_t min_class_count) {
        std::vector<std::size_t> ks = {1};
        for (int j = 1; j <= 10; ++j) {
            double frac = 0.1 * j;
            auto k = static_cast<std::size_t>(
                std::llround(frac * static_cast<double>(min_class_count)));
            ks.push_back(std::clamp<std::size_t>(k, 1, min_class_count));
        }
        std::sort(ks.begin(), ks.end());
        ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
        return ks;
    }

    static SelectionGrid standard(std::size_t min_class_count,
                                  std::vector<Assumption> assumptions = {
                                      Assumption::lua(), Assumption::lga(),
                                      Assumption::lca(BandwidthRule::silverman)}) {
        return {k_grid(min_class_count), std::move(assumptions)};
    }
};

struct SelectedParams {
    std::size_t k = 1;
    Assumption assumption;
    double inner_acc = 0.0;
};

namespace detail {

struct Split {
    Dataset train;
    Dataset test;
    std::vector<int> test_truth;
};

inline Split make_split(const Dataset& data,
                        const std::vector<std::vector<std::size_t>>& folds,
                        std::size_t test_fold) {
    std::vector<std::size_t> tr_idx;
    for (std::size_t f = 0; f < folds.size(); ++f)
        if (f != test_fold)
            tr_idx.insert(tr_idx.end(), folds[f].begin(), folds[f].end());
    std::sort(tr_idx.begin(), tr_idx.end());
    Split s;
    s.train = data.subset(tr_idx);
    s.test = data.subset(folds[test_fold]);
    s.test_truth = s.test.labels;
    return s;
}

inline std::vector<Prediction> predict_all(const Dataset& train,
                                           const Dataset& test,
                                           const ClassifierConfig& config) {
    std::vector<Prediction> preds(test.n);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (long long i = 0; i < static_cast<long long>(test.n); ++i)
        preds[static_cast<std::size_t>(i)] =
            predict(train, test.row(static_cast<std::size_t>(i)), config);
    return preds;
}

} // namespace detail

// Internal stratified 4-fold CV over the (k, assumption) grid, maximizing
// accuracy. Ties break toward smaller k, then the simpler assumption. Cells
// whose k exceeds an inner split's minimum class count run with k clamped to
// that count.
inline SelectedParams select_hyperparams(const Dataset& train,
                                         const SelectionGrid& grid,
                                         Rng& rng, Metric metric = Metric::chebychev,
                                         std::size_t inner_folds = 4) {
    if (grid.k_values.empty() || grid.assumptions.empty())
        throw std::invalid_argument("select_hyperparams: empty grid");
    auto folds = stratified_folds(train, inner_folds, rng);

    std::vector<detail::Split> splits;
    std::vector<std::size_t> inner_nm;
    for (std::size_t f = 0; f < inner_folds; ++f) {
        splits.push_back(detail::make_split(train, folds, f));
        if (splits.back().test.n == 0)
            throw std::invalid_argument("select_hyperparams: empty inner fold");
        inner_nm.push_back(splits.back().train.min_class_count());
    }

    std::optional<SelectedParams> best;
    for (std::size_t k : grid.k_values) {
        for (const Assumption& a : grid.assumptions) {
            std::size_t correct = 0, total = 0;
            for (std::size_t f = 0; f < inner_folds; ++f) {
                std::size_t k_eff = std::min(k, inner_nm[f]);
                ClassifierConfig config{NeighborhoodMode::per_class(k_eff), a, metric};
                auto preds = detail::predict_all(splits[f].train, splits[f].test, config);
                for (std::size_t i = 0; i < preds.size(); ++i)
                    if (preds[i].label == splits[f].test_truth[i]) ++correct;
                total += preds.size();
            }
            double acc = static_cast<double>(correct) / static_cast<double>(total);
            // grid iterates k ascending, then assumptions in given order
            // (simple first), so strict > implements the tie rule
            bool better = !best || acc > best->inner_acc;
            if (better) best = SelectedParams{k, a, acc};
        }
    }
    return *best;
}

struct EvalCell {
    std::size_t repeat = 0;
    std::size_t fold = 0;
    double acc = 0.0;
    double mse = 0.0;
    std::size_t chosen_k = 0;
    std::string chosen_assumption;
};

struct EvalReport {
    std::uint64_t seed = 0;
    std::size_t folds = 0;
    std::size_t repeats = 0;
    std::vector<EvalCell> cells;
    double mean_acc = 0.0, mean_mse = 0.0;
    double std_acc = 0.0, std_mse = 0.0;

    void finalize() {
        if (cells.empty())
            throw std::invalid_argument("report: no cells to aggregate");
        double sa = 0.0, sm = 0.0;
        for (const auto& c : cells) {
            sa += c.acc;
            sm += c.mse;
        }
        const double n = static_cast<double>(cells.size());
        mean_acc = sa / n;
        mean_mse = sm / n;
        double va = 0.0, vm = 0.0;
        for (const auto& c : cells) {
            va += (c.acc - mean_acc) * (c.acc - mean_acc);
            vm += (c.mse - mean_mse) * (c.mse - mean_mse);
        }
        std_acc = std::sqrt(va / n);
        std_mse = std::sqrt(vm / n);
    }
};

struct CrossTestOptions {
    std::size_t folds = 5;
    std::size_t repeats = 8;
    Metric metric = Metric::chebychev;
    std::vector<Assumption> assumptions = {Assumption::lua(), Assumption::lga(),
                                           Assumption::lca(BandwidthRule::silverman)};
    // When set, inner CV is skipped and every split uses these directly.
    std::optional<double> fixed_k_fraction;
    std::optional<Assumption> fixed_assumption;
};

// The full benchmark protocol: repeated stratified cross test with
// per-split scaling and (unless fixed) internal 4-fold hyperparameter
// selection. Scaler and selection see only the training split.
inline EvalReport cross_test(const Dataset& data, const CrossTestOptions& opts,
                             const Rng& rng) {
    if (opts.folds < 2 || opts.repeats < 1)
        throw std::invalid_argument("cross_test: need folds >= 2 and repeats >= 1");
    if (opts.fixed_k_fraction.has_value() != opts.fixed_assumption.has_value())
        throw std::invalid_argument("cross_test: fixed k and assumption go together");

    EvalReport report;
    report.seed = rng.seed();
    report.folds = opts.folds;
    report.repeats = opts.repeats;

    for (std::size_t rep = 0; rep < opts.repeats; ++rep) {
        Rng rep_rng = rng.derive(rep);
        auto folds = stratified_folds(data, opts.folds, rep_rng);
        for (std::size_t f = 0; f < opts.folds; ++f) {
            auto split = detail::make_split(data, folds, f);
            Scaler scaler = fit_scaler(split.train);
            Dataset tr = apply_scaler(scaler, split.train);
            Dataset te = apply_scaler(scaler, split.test);

            std::size_t nm = tr.min_class_count();
            SelectedParams sel;
            if (opts.fixed_k_fraction) {
                auto k = static_cast<std::size_t>(std::llround(
                    *opts.fixed_k_fraction * static_cast<double>(nm)));
                sel.k = std::clamp<std::size_t>(k, 1, nm);
                sel.assumption = *opts.fixed_assumption;
            } else {
                Rng sel_rng = rep_rng.derive(1000 + f);
                sel = select_hyperparams(
                    tr, SelectionGrid::standard(nm, opts.assumptions), sel_rng,
                    opts.metric);
            }

            ClassifierConfig config{NeighborhoodMode::per_class(sel.k),
                                    sel.assumption, opts.metric};
            auto preds = detail::predict_all(tr, te, config);
            std::vector<int> labels(preds.size());
            std::vector<std::vector<double>> post(preds.size());
            for (std::size_t i = 0; i < preds.size(); ++i) {
                labels[i] = preds[i].label;
                post[i] = preds[i].posteriors;
            }
            EvalCell cell;
            cell.repeat = rep;
            cell.fold = f;
            cell.acc = accuracy(labels, split.test_truth);
            cell.mse = mse(post, split.test_truth);
            cell.chosen_k = sel.k;
            cell.chosen_assumption = to_string(sel.assumption);
            report.cells.push_back(cell);
        }
    }
    report.finalize();
    return report;
}

struct SweepCell {
    double k_fraction = 0.0;
    std::string assumption;
    double mean_acc = 0.0;
    double mean_mse = 0.0;
};

// Fixed-hyperparameter cross tests over a (k-fraction, assumption) grid;
// the data behind the neighborhood-size performance curves.
inline std::vector<SweepCell> sweep(const Dataset& data,
                                    const std::vector<double>& k_fractions,
                                    const std::vector<Assumption>& assumptions,
                                    std::size_t repeats, std::size_t folds,
                                    const Rng& rng) {
    std::vector<SweepCell> out;
    std::size_t cell_idx = 0;
    for (double frac : k_fractions) {
        for (const Assumption& a : assumptions) {
            CrossTestOptions opts;
            opts.folds = folds;
            opts.repeats = repeats;
            opts.fixed_k_fraction = frac;
            opts.fixed_assumption = a;
            Rng cell_rng = rng.derive(0xC0FFEE + cell_idx++);
            EvalReport r = cross_test(data, opts, cell_rng);
            out.push_back({frac, to_string(a), r.mean_acc, r.mean_mse});
        }
    }
    return out;
}

} // namespace lpmbc

#endif
