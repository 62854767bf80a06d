#ifndef LPMBC_CLASSIFIER_HPP
#define LPMBC_CLASSIFIER_HPP

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "lpmbc/lpm.hpp"

namespace lpmbc {

struct LossMatrix {
    std::size_t c = 0;
    std::vector<double> lambda; // c*c, entry (y, l) = cost of deciding l when truth is y

    double at(std::size_t y, std::size_t l) const { return lambda[y * c + l]; }

    static LossMatrix zero_one(std::size_t c) {
        LossMatrix m;
        m.c = c;
        m.lambda.assign(c * c, 1.0);
        for (std::size_t i = 0; i < c; ++i) m.lambda[i * c + i] = 0.0;
        return m;
    }
};

struct ClassifierConfig {
    NeighborhoodMode mode;
    Assumption assumption;
    Metric metric = Metric::chebychev;
    LossMatrix loss; // empty -> 0-1 loss sized at prediction time

    void validate() const {
        if (mode.kind == NeighborhoodKind::global &&
            assumption.kind == AssumptionKind::LUA)
            throw std::invalid_argument(
                "config: LUA over the whole space has no finite volume");
        if (mode.kind != NeighborhoodKind::global && mode.k < 1)
            throw std::invalid_argument("config: k must be >= 1");
    }
};

struct Prediction {
    int label = -1;
    std::vector<double> posteriors;
    std::vector<double> per_class_log_scores; // ln k_l + log_lpd_l
    std::size_t selected_k = 0;
    Assumption selected_assumption;
    bool prior_fallback = false; // all classes scored -inf; priors used instead
};

// Per-class log score ln(k_l) + log f_{R_l}(x | l). The constant 1/n prior
// factor is dropped; it cancels in the posterior and never moves the argmax.
inline std::vector<double> score(const Dataset& train, std::span<const double> query,
                                 const ClassifierConfig& config) {
    config.validate();
    auto regions = build_regions(train, query, config.mode, config.metric);
    std::vector<double> scores(regions.size(), kNegInf);
    for (std::size_t cls = 0; cls < regions.size(); ++cls) {
        const auto& cr = regions[cls];
        if (cr.members.empty()) continue; // possible in shared mode
        LocalModel m = fit(config.assumption, cr.region, train, cr.members,
                           static_cast<int>(cls));
        double lpd = log_lpd(m, query);
        if (std::isinf(lpd) && lpd < 0) continue;
        scores[cls] = std::log(static_cast<double>(cr.members.size())) + lpd;
    }
    return scores;
}

// Softmax of log scores via log-sum-exp; -inf entries get probability 0.
// Throws if every entry is -inf (predict() falls back to priors instead).
inline std::vector<double> posteriors(std::span<const double> log_scores) {
    double lse = log_sum_exp(log_scores);
    if (std::isinf(lse) && lse < 0)
        throw std::domain_error("posteriors: all scores are -inf");
    std::vector<double> p(log_scores.size());
    for (std::size_t i = 0; i < p.size(); ++i)
        p[i] = std::isinf(log_scores[i]) ? 0.0 : std::exp(log_scores[i] - lse);
    return p;
}

// Minimum expected risk under the loss matrix; ties go to the lowest class
// index. With 0-1 loss this is the posterior argmax.
inline int decide(std::span<const double> post, const LossMatrix& loss) {
    const std::size_t c = post.size();
    int best = 0;
    double best_risk = std::numeric_limits<double>::infinity();
    for (std::size_t l = 0; l < c; ++l) {
        double risk = 0.0;
        for (std::size_t y = 0; y < c; ++y) risk += loss.at(y, l) * post[y];
        if (risk < best_risk) {
            best_risk = risk;
            best = static_cast<int>(l);
        }
    }
    return best;
}

namespace detail {

// Turn per-class log scores into posteriors and a decision, with the
// prior-frequency fallback when every class scored -inf.
inline Prediction finalize_prediction(const Dataset& train,
                                      const ClassifierConfig& config,
                                      std::vector<double> log_scores) {
    Prediction pred;
    pred.per_class_log_scores = std::move(log_scores);
    pred.selected_k = config.mode.k;
    pred.selected_assumption = config.assumption;

    bool any_finite = false;
    for (double s : pred.per_class_log_scores)
        if (!(std::isinf(s) && s < 0)) any_finite = true;

    if (any_finite) {
        pred.posteriors = posteriors(pred.per_class_log_scores);
    } else {
        // Every class scored -inf: fall back to training frequencies so the
        // benchmark always gets a prediction; flagged for diagnostics.
        pred.prior_fallback = true;
        auto counts = train.class_counts();
        pred.posteriors.resize(counts.size());
        for (std::size_t i = 0; i < counts.size(); ++i)
            pred.posteriors[i] = static_cast<double>(counts[i]) /
                                 static_cast<double>(train.n);
    }

    LossMatrix loss = config.loss.c == train.num_classes()
                          ? config.loss
                          : LossMatrix::zero_one(train.num_classes());
    pred.label = decide(pred.posteriors, loss);
    return pred;
}

} // namespace detail

inline Prediction predict(const Dataset& train, std::span<const double> query,
                          const ClassifierConfig& config) {
    return detail::finalize_prediction(train, config, score(train, query, config));
}

enum class NamedVariant {
    voting_knn,  // shared region + LUA
    dw_knn,      // shared region + unit-bandwidth LCA
    local_mean,  // per-class region + identity-variance LGA
    ld_knn,      // shared region + LGA
    gaussian_nb, // global + LGA
    kde_nb       // global + silverman LCA
};

inline ClassifierConfig named_config(NamedVariant variant, std::size_t k) {
    switch (variant) {
    case NamedVariant::voting_knn:
        return {NeighborhoodMode::shared(k), Assumption::lua()};
    case NamedVariant::dw_knn:
        return {NeighborhoodMode::shared(k), Assumption::lca(BandwidthRule::unit)};
    case NamedVariant::local_mean:
        return {NeighborhoodMode::per_class(k), Assumption::lga_identity()};
    case NamedVariant::ld_knn:
        return {NeighborhoodMode::shared(k), Assumption::lga()};
    case NamedVariant::gaussian_nb:
        return {NeighborhoodMode::global(), Assumption::lga()};
    case NamedVariant::kde_nb:
        return {NeighborhoodMode::global(), Assumption::lca(BandwidthRule::silverman)};
    }
    throw std::invalid_argument("named_config: unknown variant");
}

inline Prediction predict_named(const Dataset& train, std::span<const double> query,
                                NamedVariant variant, std::size_t k = 1) {
    ClassifierConfig config = named_config(variant, k);
    if (variant != NamedVariant::dw_knn && variant != NamedVariant::local_mean)
        return predict(train, query, config);

    // The distance-weighted and local-mean reductions drop the region
    // normalizer. For dw_knn, ln(k_l) cancels the 1/k_l in the unit-bandwidth
    // KDE and class l is scored by the raw kernel-weight sum over its
    // in-region members; for local_mean, the identity-variance Gaussian makes
    // the score a pure squared distance to the local center. Normalizing
    // would reintroduce a member-dependent factor and break both reductions.
    config.validate();
    auto regions = build_regions(train, query, config.mode, config.metric);
    std::vector<double> scores(regions.size(), kNegInf);
    for (std::size_t cls = 0; cls < regions.size(); ++cls) {
        const auto& cr = regions[cls];
        if (cr.members.empty()) continue;
        LocalModel m = fit(config.assumption, cr.region, train, cr.members,
                           static_cast<int>(cls));
        scores[cls] = std::log(static_cast<double>(cr.members.size())) +
                      detail::log_unnormalized_density(m, query);
    }
    return detail::finalize_prediction(train, config, std::move(scores));
}

} // namespace lpmbc

#endif
