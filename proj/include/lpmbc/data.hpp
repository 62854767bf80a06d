#ifndef LPMBC_DATA_HPP
#define LPMBC_DATA_HPP

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "lpmbc/dataset.hpp"
#include "lpmbc/eval.hpp"

namespace lpmbc {

struct CsvSchema {
    bool has_header = true;
    int label_column = -1;           // -1 = last column
    std::string label_column_name;   // overrides index when nonempty
    char delimiter = ',';
};

namespace detail {

inline std::vector<std::string> split_line(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, delim)) out.push_back(field);
    if (!line.empty() && line.back() == delim) out.emplace_back();
    return out;
}

inline bool parse_double(const std::string& s, double& out) {
    try {
        std::size_t pos = 0;
        out = std::stod(s, &pos);
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
        return pos == s.size();
    } catch (...) {
        return false;
    }
}

} // namespace detail

// RFC-4180-style CSV: one label column (default last), every other column a
// finite real. Class vocabulary is ordered by first appearance.
inline Dataset load_csv(const std::string& path, const CsvSchema& schema = {}) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_csv: cannot open '" + path + "'");

    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        rows.push_back(detail::split_line(line, schema.delimiter));
    }
    if (rows.empty()) throw std::runtime_error("load_csv: '" + path + "' is empty");

    const std::size_t cols = rows[0].size();
    if (cols < 2) throw std::runtime_error("load_csv: need at least 2 columns");

    std::vector<std::string> header;
    std::size_t first_data = 0;
    if (schema.has_header) {
        header = rows[0];
        first_data = 1;
        if (rows.size() < 2) throw std::runtime_error("load_csv: no data rows");
    } else {
        for (std::size_t j = 0; j < cols; ++j) header.push_back("f" + std::to_string(j));
    }

    std::size_t label_col;
    if (!schema.label_column_name.empty()) {
        auto it = std::find(header.begin(), header.end(), schema.label_column_name);
        if (it == header.end())
            throw std::runtime_error("load_csv: no column named '" +
                                     schema.label_column_name + "'");
        label_col = static_cast<std::size_t>(it - header.begin());
    } else if (schema.label_column < 0) {
        label_col = cols - 1;
    } else {
        label_col = static_cast<std::size_t>(schema.label_column);
        if (label_col >= cols) throw std::runtime_error("load_csv: label column out of range");
    }

    Dataset ds;
    ds.d = cols - 1;
    for (std::size_t j = 0; j < cols; ++j)
        if (j != label_col) ds.feature_names.push_back(header[j]);

    for (std::size_t r = first_data; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() != cols)
            throw std::runtime_error("load_csv: row " + std::to_string(r + 1) +
                                     " has " + std::to_string(row.size()) +
                                     " fields, expected " + std::to_string(cols));
        for (std::size_t j = 0; j < cols; ++j) {
            if (j == label_col) {
                const std::string& name = row[j];
                auto it = std::find(ds.class_names.begin(), ds.class_names.end(), name);
                if (it == ds.class_names.end()) {
                    ds.class_names.push_back(name);
                    ds.labels.push_back(static_cast<int>(ds.class_names.size()) - 1);
                } else {
                    ds.labels.push_back(static_cast<int>(it - ds.class_names.begin()));
                }
            } else {
                double v;
                if (!detail::parse_double(row[j], v) || !std::isfinite(v))
                    throw std::runtime_error("load_csv: bad value at row " +
                                             std::to_string(r + 1) + ", column " +
                                             std::to_string(j + 1));
                ds.features.push_back(v);
            }
        }
    }
    ds.n = ds.labels.size();
    ds.check();
    return ds;
}

inline void save_csv(const Dataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_csv: cannot write '" + path + "'");
    for (std::size_t j = 0; j < ds.d; ++j) out << ds.feature_names[j] << ',';
    out << "class\n";
    char buf[32];
    for (std::size_t i = 0; i < ds.n; ++i) {
        auto r = ds.row(i);
        for (double v : r) {
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            out << buf << ',';
        }
        out << ds.class_names[static_cast<std::size_t>(ds.labels[i])] << '\n';
    }
    if (!out) throw std::runtime_error("save_csv: write failed for '" + path + "'");
}

// Two 2-d Gaussian classes centered at [0,1] and [0,-1], common covariance
// [[2, C], [C, 2]].
struct SyntheticSpec {
    std::size_t n_per_class = 100;
    double covariance_c = 0.0;
};

inline Dataset gen_synthetic(const SyntheticSpec& spec, Rng& rng) {
    const double c = spec.covariance_c;
    if (std::abs(c) > 2.0)
        throw std::invalid_argument("gen_synthetic: |C| <= 2 required for a PSD covariance");
    if (spec.n_per_class < 1)
        throw std::invalid_argument("gen_synthetic: n_per_class >= 1 required");

    // Closed-form lower Cholesky of [[2, C], [C, 2]].
    const double l11 = std::sqrt(2.0);
    const double l21 = c / l11;
    const double l22 = std::sqrt(2.0 - c * c / 2.0);
    const double centers[2][2] = {{0.0, 1.0}, {0.0, -1.0}};

    Dataset ds;
    ds.d = 2;
    ds.n = 2 * spec.n_per_class;
    ds.feature_names = {"x1", "x2"};
    ds.class_names = {"c1", "c2"};
    ds.features.reserve(ds.n * 2);
    ds.labels.reserve(ds.n);
    for (int cls = 0; cls < 2; ++cls) {
        for (std::size_t i = 0; i < spec.n_per_class; ++i) {
            double z1 = rng.next_normal();
            double z2 = rng.next_normal();
            ds.features.push_back(centers[cls][0] + l11 * z1);
            ds.features.push_back(centers[cls][1] + l21 * z1 + l22 * z2);
            ds.labels.push_back(cls);
        }
    }
    return ds;
}

inline nlohmann::ordered_json report_to_json(const EvalReport& report) {
    nlohmann::ordered_json j;
    j["config"] = {{"seed", report.seed},
                   {"folds", report.folds},
                   {"repeats", report.repeats}};
    j["cells"] = nlohmann::ordered_json::array();
    for (const auto& c : report.cells)
        j["cells"].push_back({{"repeat", c.repeat},
                              {"fold", c.fold},
                              {"acc", c.acc},
                              {"mse", c.mse},
                              {"chosen_k", c.chosen_k},
                              {"chosen_assumption", c.chosen_assumption}});
    j["aggregates"] = {{"mean_acc", report.mean_acc},
                       {"mean_mse", report.mean_mse},
                       {"std_acc", report.std_acc},
                       {"std_mse", report.std_mse}};
    return j;
}

inline EvalReport report_from_json(const nlohmann::ordered_json& j) {
    EvalReport r;
    r.seed = j.at("config").at("seed").get<std::uint64_t>();
    r.folds = j.at("config").at("folds").get<std::size_t>();
    r.repeats = j.at("config").at("repeats").get<std::size_t>();
    for (const auto& c : j.at("cells")) {
        EvalCell cell;
        cell.repeat = c.at("repeat").get<std::size_t>();
        cell.fold = c.at("fold").get<std::size_t>();
        cell.acc = c.at("acc").get<double>();
        cell.mse = c.at("mse").get<double>();
        cell.chosen_k = c.at("chosen_k").get<std::size_t>();
        cell.chosen_assumption = c.at("chosen_assumption").get<std::string>();
        r.cells.push_back(cell);
    }
    r.mean_acc = j.at("aggregates").at("mean_acc").get<double>();
    r.mean_mse = j.at("aggregates").at("mean_mse").get<double>();
    r.std_acc = j.at("aggregates").at("std_acc").get<double>();
    r.std_mse = j.at("aggregates").at("std_mse").get<double>();
    return r;
}

enum class ReportFormat { json, csv };

inline void save_report(const EvalReport& report, const std::string& path,
                        ReportFormat format) {
    if (report.cells.empty())
        throw std::invalid_argument("save_report: report has no cells");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_report: cannot write '" + path + "'");
    if (format == ReportFormat::json) {
        out << report_to_json(report).dump(2) << '\n';
    } else {
        out << "repeat,fold,acc,mse,chosen_k,chosen_assumption\n";
        char buf[64];
        for (const auto& c : report.cells) {
            std::snprintf(buf, sizeof(buf), "%zu,%zu,%.17g,%.17g,%zu,", c.repeat,
                          c.fold, c.acc, c.mse, c.chosen_k);
            out << buf << c.chosen_assumption << '\n';
        }
    }
    if (!out) throw std::runtime_error("save_report: write failed for '" + path + "'");
}

inline EvalReport load_report_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_report_json: cannot open '" + path + "'");
    nlohmann::ordered_json j;
    in >> j;
    return report_from_json(j);
}

} // namespace lpmbc

#endif
