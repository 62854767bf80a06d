// Command-line front end: prediction, benchmarking, parameter sweeps,
// synthetic data generation, and the invariant verifier.
//
// Exit codes: 0 success, 1 usage error, 2 IO error, 3 numeric/infeasible.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lpmbc/lpmbc.hpp"
#include "checks.hpp"

namespace {

using namespace lpmbc;

Metric parse_metric(const std::string& s) {
    if (s == "chebychev") return Metric::chebychev;
    if (s == "euclidean") return Metric::euclidean;
    throw CLI::ValidationError("--metric", "unknown metric '" + s + "'");
}

Assumption parse_assumption(const std::string& s, const std::string& bandwidth) {
    BandwidthRule rule = bandwidth == "silverman" ? BandwidthRule::silverman
                                                  : BandwidthRule::unit;
    if (s == "lua") return Assumption::lua();
    if (s == "lga") return Assumption::lga();
    if (s == "lca") return Assumption::lca(rule);
    throw CLI::ValidationError("--assumption", "unknown assumption '" + s + "'");
}

NeighborhoodMode parse_mode(const std::string& s, std::size_t k) {
    if (s == "per-class") return NeighborhoodMode::per_class(k);
    if (s == "shared") return NeighborhoodMode::shared(k);
    if (s == "global") return NeighborhoodMode::global();
    throw CLI::ValidationError("--mode", "unknown mode '" + s + "'");
}

std::vector<std::string> split_csv_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    return out;
}

// Query file: CSV of feature rows only (no label column). A header row is
// detected by non-numeric cells.
std::vector<std::vector<double>> load_points(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::vector<std::vector<double>> out;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> row;
        bool numeric = true;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t pos = 0;
                row.push_back(std::stod(cell, &pos));
            } catch (...) {
                numeric = false;
                break;
            }
        }
        if (!numeric) {
            if (first) {
                first = false;
                continue; // header
            }
            throw std::runtime_error("non-numeric cell in '" + path + "'");
        }
        first = false;
        out.push_back(std::move(row));
    }
    if (out.empty()) throw std::runtime_error("no query points in '" + path + "'");
    return out;
}

int run_predict(const std::string& train_path, const std::string& query_path,
                const std::string& mode, std::size_t k, const std::string& assumption,
                const std::string& bandwidth, const std::string& metric,
                const std::string& out_path) {
    Dataset train = load_csv(train_path);
    auto queries = load_points(query_path);

    Scaler scaler = fit_scaler(train);
    Dataset tr = apply_scaler(scaler, train);

    ClassifierConfig config{parse_mode(mode, k),
                            parse_assumption(assumption, bandwidth),
                            parse_metric(metric)};
    config.validate();

    std::ostringstream os;
    os << "label";
    for (const auto& name : train.class_names) os << ",p_" << name;
    os << '\n';
    char buf[64];
    for (const auto& q : queries) {
        if (q.size() != train.d)
            throw std::invalid_argument("query dimension mismatch");
        auto scaled = apply_scaler(scaler, std::span<const double>(q));
        Prediction p = predict(tr, scaled, config);
        os << train.class_names[static_cast<std::size_t>(p.label)];
        for (double v : p.posteriors) {
            std::snprintf(buf, sizeof(buf), ",%.12g", v);
            os << buf;
        }
        os << '\n';
    }
    if (out_path.empty()) {
        std::cout << os.str();
    } else {
        std::ofstream out(out_path);
        if (!out) throw std::runtime_error("cannot write '" + out_path + "'");
        out << os.str();
    }
    return 0;
}

int run_bench(const std::string& data_path, std::size_t folds, std::size_t repeats,
              std::uint64_t seed, const std::string& out_path,
              const std::string& format) {
    Dataset data = load_csv(data_path);
    CrossTestOptions opts;
    opts.folds = folds;
    opts.repeats = repeats;
    Rng rng(seed);
    auto t0 = std::chrono::steady_clock::now();
    EvalReport report = cross_test(data, opts, rng);
    auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("dataset=%s n=%zu d=%zu c=%zu folds=%zu repeats=%zu\n",
                data_path.c_str(), data.n, data.d, data.num_classes(), folds, repeats);
    std::printf("mean_acc=%.4f std_acc=%.4f mean_mse=%.4f std_mse=%.4f (%.1fs)\n",
                report.mean_acc, report.std_acc, report.mean_mse, report.std_mse, secs);
    if (!out_path.empty())
        save_report(report, out_path,
                    format == "csv" ? ReportFormat::csv : ReportFormat::json);
    return 0;
}

int run_sweep(const std::string& data_path, const std::string& k_fracs,
              const std::string& assumptions, std::size_t folds, std::size_t repeats,
              std::uint64_t seed, const std::string& out_path,
              const std::string& bandwidth) {
    Dataset data = load_csv(data_path);
    std::vector<double> fracs;
    for (const auto& s : split_csv_list(k_fracs)) fracs.push_back(std::stod(s));
    std::vector<Assumption> assume;
    for (const auto& s : split_csv_list(assumptions))
        assume.push_back(parse_assumption(s, bandwidth));
    if (fracs.empty() || assume.empty())
        throw std::invalid_argument("sweep: empty grid");

    Rng rng(seed);
    auto cells = sweep(data, fracs, assume, repeats, folds, rng);

    std::ostringstream os;
    os << "k_fraction,assumption,mean_acc,mean_mse\n";
    char buf[96];
    for (const auto& c : cells) {
        std::snprintf(buf, sizeof(buf), "%.3g,%s,%.17g,%.17g\n", c.k_fraction,
                      c.assumption.c_str(), c.mean_acc, c.mean_mse);
        os << buf;
    }
    if (out_path.empty()) {
        std::cout << os.str();
    } else {
        std::ofstream out(out_path);
        if (!out) throw std::runtime_error("cannot write '" + out_path + "'");
        out << os.str();
    }
    return 0;
}

int run_synth(double c, std::size_t n, std::uint64_t seed, const std::string& out_path) {
    SyntheticSpec spec;
    spec.covariance_c = c;
    spec.n_per_class = n;
    Rng rng(seed);
    Dataset ds = gen_synthetic(spec, rng);
    save_csv(ds, out_path);
    std::printf("wrote %zu samples (2 classes, C=%g) to %s\n", ds.n, c, out_path.c_str());
    return 0;
}

int run_verify(std::uint64_t seed) {
    struct Item {
        const char* name;
        bool passed;
        std::string detail;
    };
    std::vector<Item> items;
    auto add = [&](const char* name, auto fn) {
        std::string detail;
        bool ok = fn(&detail);
        items.push_back({name, ok, detail});
    };

    add("unitarity", [&](std::string* d) { return checks::unitarity(seed, 48, 12, d); });
    add("subregion-independence", [&](std::string* d) { return checks::independence_preserved(seed, 50, 10, d); });
    add("voting-knn-equivalence", [&](std::string* d) { return checks::knn_equivalence(seed, 50, d); });
    add("gaussian-nb-equivalence", [&](std::string* d) { return checks::gnb_equivalence(seed, 50, d); });
    add("dw-knn-equivalence", [&](std::string* d) { return checks::dwknn_equivalence(seed, 50, d); });
    add("local-mean-equivalence", [&](std::string* d) { return checks::lmm_equivalence(seed, 30, d); });
    add("scaler-round-trip", [&](std::string* d) {
        lpmbc::Rng rng(seed);
        auto ds = oracles::random_dataset(rng, 20, 4, 2);
        auto scaler = lpmbc::fit_scaler(ds);
        auto scaled = lpmbc::apply_scaler(scaler, ds);
        for (std::size_t i = 0; i < ds.n; ++i)
            for (std::size_t j = 0; j < ds.d; ++j) {
                double back = scaled.row(i)[j] * scaler.stddevs[j] + scaler.means[j];
                if (std::abs(back - ds.row(i)[j]) > 1e-12) {
                    checks::note(d, "round-trip exceeded 1e-12");
                    return false;
                }
            }
        return true;
    });
    add("fold-determinism", [&](std::string* d) {
        lpmbc::Rng rng(seed);
        auto ds = oracles::random_dataset(rng, 25, 3, 3);
        lpmbc::Rng r1(seed + 1), r2(seed + 1);
        if (lpmbc::stratified_folds(ds, 5, r1) != lpmbc::stratified_folds(ds, 5, r2)) {
            checks::note(d, "same seed gave different folds");
            return false;
        }
        return true;
    });

    bool all = true;
    for (const auto& item : items) {
        std::printf("%-26s %s%s%s\n", item.name, item.passed ? "PASS" : "FAIL",
                    item.detail.empty() ? "" : "  -- ", item.detail.c_str());
        all = all && item.passed;
    }
    return all ? 0 : 3;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"LPM-BC: Bayesian classification with local probabilistic models"};
    app.require_subcommand(1);

    // predict
    auto* predict_cmd = app.add_subcommand("predict", "classify query points");
    std::string train_path, query_path, out_path;
    std::string mode = "per-class", assumption = "lga", bandwidth = "silverman",
                metric = "chebychev", format = "json";
    std::size_t k = 5, folds = 5, repeats = 8, n = 100;
    std::uint64_t seed = 0;
    double c = 0.0;
    predict_cmd->add_option("--train", train_path, "training CSV")->required();
    predict_cmd->add_option("--query", query_path, "query-point CSV (features only)")->required();
    predict_cmd->add_option("--mode", mode, "per-class|shared|global");
    predict_cmd->add_option("--k", k, "neighborhood size");
    predict_cmd->add_option("--assumption", assumption, "lua|lga|lca");
    predict_cmd->add_option("--bandwidth", bandwidth, "unit|silverman (lca)");
    predict_cmd->add_option("--metric", metric, "chebychev|euclidean");
    predict_cmd->add_option("--out", out_path, "output CSV (default stdout)");

    // bench
    auto* bench_cmd = app.add_subcommand("bench", "cross-validated benchmark");
    bench_cmd->add_option("--data", train_path, "dataset CSV")->required();
    bench_cmd->add_option("--folds", folds, "outer folds");
    bench_cmd->add_option("--repeats", repeats, "protocol repeats");
    bench_cmd->add_option("--seed", seed, "rng seed");
    bench_cmd->add_option("--out", out_path, "report file");
    bench_cmd->add_option("--format", format, "json|csv");

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "fixed-parameter performance grid");
    std::string k_fracs = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0";
    std::string assumptions = "lua,lga,lca";
    sweep_cmd->add_option("--data", train_path, "dataset CSV")->required();
    sweep_cmd->add_option("--k-fracs", k_fracs, "comma list of k fractions of N_m");
    sweep_cmd->add_option("--assumptions", assumptions, "comma list of lua|lga|lca");
    sweep_cmd->add_option("--bandwidth", bandwidth, "unit|silverman (lca)");
    sweep_cmd->add_option("--folds", folds, "outer folds");
    sweep_cmd->add_option("--repeats", repeats, "protocol repeats");
    sweep_cmd->add_option("--seed", seed, "rng seed");
    sweep_cmd->add_option("--out", out_path, "curve CSV");

    // synth
    auto* synth_cmd = app.add_subcommand("synth", "generate correlated-Gaussian data");
    synth_cmd->add_option("--c", c, "feature covariance, |C| <= 2");
    synth_cmd->add_option("--n", n, "samples per class");
    synth_cmd->add_option("--seed", seed, "rng seed");
    synth_cmd->add_option("--out", out_path, "output CSV")->required();

    // verify
    auto* verify_cmd = app.add_subcommand("verify", "run the invariant oracles");
    verify_cmd->add_option("--seed", seed, "rng seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (predict_cmd->parsed())
            return run_predict(train_path, query_path, mode, k, assumption, bandwidth,
                               metric, out_path);
        if (bench_cmd->parsed())
            return run_bench(train_path, folds, repeats, seed, out_path, format);
        if (sweep_cmd->parsed())
            return run_sweep(train_path, k_fracs, assumptions, folds, repeats, seed,
                             out_path, bandwidth);
        if (synth_cmd->parsed()) return run_synth(c, n, seed, out_path);
        if (verify_cmd->parsed()) return run_verify(seed == 0 ? 42 : seed);
    } catch (const CLI::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::runtime_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 1;
}
