#include "trimsvm/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "trimsvm/errors.hpp"

namespace trimsvm {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    cells.push_back(cur);
    return cells;
}

std::string trimmed(const std::string& s) {
    auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& cell, std::size_t line) {
    const std::string t = trimmed(cell);
    if (t.empty()) throw parse_error("empty numeric cell", line);
    char* end = nullptr;
    double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size()) throw parse_error("malformed numeric cell '" + t + "'", line);
    if (!std::isfinite(v)) throw parse_error("non-finite value '" + t + "'", line);
    return v;
}

// Maps raw label tokens to {+1,-1}. Accepts {+1,-1}, {1,0} with 0 -> -1, or
// any two distinct strings in first-seen order. Records the mapping when the
// input was not already +/-1.
class LabelMapper {
  public:
    int map(const std::string& token, std::size_t line) {
        const std::string t = trimmed(token);
        if (t.empty()) throw parse_error("empty label cell", line);
        if (seen_.empty() || (seen_.size() == 1 && t != seen_[0])) seen_.push_back(t);
        if (t != seen_[0] && (seen_.size() < 2 || t != seen_[1]))
            throw parse_error("more than two distinct labels ('" + t + "')", line);
        return t == seen_[0] ? 0 : 1;  // positional; resolved in finish()
    }

    std::pair<std::vector<int>, std::optional<std::pair<std::string, std::string>>>
    finish(const std::vector<int>& positional) const {
        // Canonical numeric conventions first.
        auto as = [&](const std::string& plus, const std::string& minus,
                      std::vector<int>& out) -> bool {
            std::vector<std::string> want;
            for (const auto& s : seen_)
                if (s == plus || s == minus) want.push_back(s);
            if (want.size() != seen_.size()) return false;
            out.resize(positional.size());
            for (std::size_t i = 0; i < positional.size(); ++i)
                out[i] = (seen_[positional[i]] == plus) ? +1 : -1;
            return true;
        };
        std::vector<int> labels;
        for (auto [p, n] : {std::pair{std::string("1"), std::string("-1")},
                            std::pair{std::string("+1"), std::string("-1")},
                            std::pair{std::string("1"), std::string("0")}}) {
            if (as(p, n, labels)) {
                std::optional<std::pair<std::string, std::string>> mapping;
                if (n == "0") mapping = {p, n};
                return {labels, mapping};
            }
        }
        // Two arbitrary tokens: first seen -> +1.
        labels.resize(positional.size());
        for (std::size_t i = 0; i < positional.size(); ++i)
            labels[i] = positional[i] == 0 ? +1 : -1;
        std::optional<std::pair<std::string, std::string>> mapping;
        if (seen_.size() == 2)
            mapping = {seen_[0], seen_[1]};
        else if (!seen_.empty())
            mapping = {seen_[0], std::string()};
        return {labels, mapping};
    }

  private:
    std::vector<std::string> seen_;
};

std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

Dataset load_csv_impl(const std::string& path, const std::string* label_name,
                      Eigen::Index label_index) {
    std::ifstream in(path);
    if (!in) throw missing_file_error(path);

    std::string line;
    if (!std::getline(in, line)) throw empty_file_error(path);
    std::vector<std::string> header = split_csv_line(line);
    for (auto& h : header) h = trimmed(h);

    Eigen::Index label_col = label_index;
    if (label_name != nullptr) {
        auto it = std::find(header.begin(), header.end(), *label_name);
        if (it == header.end())
            throw parse_error("label column '" + *label_name + "' not in header", 1);
        label_col = static_cast<Eigen::Index>(it - header.begin());
    }
    if (label_col < 0 || label_col >= static_cast<Eigen::Index>(header.size()))
        throw parse_error("label column index out of range", 1);

    const Eigen::Index d = static_cast<Eigen::Index>(header.size()) - 1;
    std::vector<double> values;
    std::vector<int> positional_labels;
    LabelMapper mapper;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trimmed(line).empty()) continue;
        std::vector<std::string> cells = split_csv_line(line);
        if (static_cast<Eigen::Index>(cells.size()) != d + 1)
            throw parse_error("expected " + std::to_string(d + 1) + " columns, got " +
                                  std::to_string(cells.size()),
                              line_no);
        for (Eigen::Index j = 0; j < d + 1; ++j) {
            if (j == label_col)
                positional_labels.push_back(mapper.map(cells[j], line_no));
            else
                values.push_back(parse_number(cells[j], line_no));
        }
    }
    const Eigen::Index m = static_cast<Eigen::Index>(positional_labels.size());
    if (m == 0) throw empty_file_error(path);

    Dataset ds;
    ds.features.resize(m, d);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < d; ++j) ds.features(i, j) = values[i * d + j];
    auto [labels, mapping] = mapper.finish(positional_labels);
    ds.labels = std::move(labels);
    ds.label_mapping = mapping;
    ds.ids.resize(m);
    for (Eigen::Index i = 0; i < m; ++i) ds.ids[i] = i;
    for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(header.size()); ++j)
        if (j != label_col) ds.feature_names.push_back(header[j]);
    return ds;
}

}  // namespace

Dataset load_csv(const std::string& path, const std::string& label_column) {
    return load_csv_impl(path, &label_column, -1);
}

Dataset load_csv(const std::string& path, Eigen::Index label_column) {
    return load_csv_impl(path, nullptr, label_column);
}

Dataset load_libsvm(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw missing_file_error(path);

    std::vector<std::vector<std::pair<Eigen::Index, double>>> rows;
    std::vector<int> labels;
    Eigen::Index max_index = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string token;
        if (!(ls >> token)) continue;  // blank line
        int label;
        if (token == "+1" || token == "1")
            label = +1;
        else if (token == "-1" || token == "0")
            label = -1;
        else
            throw parse_error("unrecognized label '" + token + "'", line_no);
        labels.push_back(label);
        rows.emplace_back();
        while (ls >> token) {
            auto colon = token.find(':');
            if (colon == std::string::npos)
                throw parse_error("expected idx:val, got '" + token + "'", line_no);
            Eigen::Index idx = 0;
            auto [p, ec] = std::from_chars(token.data(), token.data() + colon, idx);
            if (ec != std::errc() || p != token.data() + colon || idx < 1)
                throw parse_error("bad feature index in '" + token + "'", line_no);
            double v = parse_number(token.substr(colon + 1), line_no);
            rows.back().emplace_back(idx - 1, v);  // 1-based on disk
            max_index = std::max(max_index, idx);
        }
    }
    const Eigen::Index m = static_cast<Eigen::Index>(labels.size());
    if (m == 0) throw empty_file_error(path);

    Dataset ds;
    ds.features = Matrix::Zero(m, max_index);
    for (Eigen::Index i = 0; i < m; ++i)
        for (auto [j, v] : rows[i]) ds.features(i, j) = v;
    ds.labels = std::move(labels);
    ds.ids.resize(m);
    for (Eigen::Index i = 0; i < m; ++i) ds.ids[i] = i;
    for (Eigen::Index j = 0; j < max_index; ++j) ds.feature_names.push_back("f" + std::to_string(j + 1));
    return ds;
}

void save_csv(const Dataset& d, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw error("cannot open for writing: " + path);
    out << "label";
    for (Eigen::Index j = 0; j < d.dim(); ++j) {
        out << ',';
        out << (j < static_cast<Eigen::Index>(d.feature_names.size())
                    ? d.feature_names[j]
                    : "f" + std::to_string(j + 1));
    }
    out << '\n';
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        out << d.labels[i];
        for (Eigen::Index j = 0; j < d.dim(); ++j) out << ',' << format_double(d.features(i, j));
        out << '\n';
    }
}

std::pair<Dataset, ScalerStats> standardize(const Dataset& d) {
    const Eigen::Index m = d.size();
    const Eigen::Index p = d.dim();
    if (m < 2) throw too_few_samples_error("standardize requires m >= 2");

    ScalerStats stats;
    stats.mean = d.features.colwise().mean();
    stats.sd.resize(p);
    stats.zero_variance.assign(p, false);
    for (Eigen::Index j = 0; j < p; ++j) {
        double ss = (d.features.col(j).array() - stats.mean(j)).square().sum();
        double sd = std::sqrt(ss / static_cast<double>(m - 1));
        stats.sd(j) = sd;
        stats.zero_variance[j] = (sd == 0.0);
    }
    Dataset out = d;
    out.features = apply_scaler(d.features, stats);
    return {out, stats};
}

Matrix apply_scaler(const Matrix& X, const ScalerStats& stats) {
    if (X.cols() != stats.mean.size())
        throw dimension_error("scaler dimension mismatch");
    Matrix Z = X;
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        if (stats.zero_variance[j])
            Z.col(j).setZero();
        else
            Z.col(j) = (X.col(j).array() - stats.mean(j)) / stats.sd(j);
    }
    return Z;
}

Matrix invert_scaler(const Matrix& Z, const ScalerStats& stats) {
    if (Z.cols() != stats.mean.size())
        throw dimension_error("scaler dimension mismatch");
    Matrix X = Z;
    for (Eigen::Index j = 0; j < Z.cols(); ++j)
        X.col(j) = Z.col(j).array() * stats.sd(j) + stats.mean(j);
    return X;
}

double label_ratio(const Dataset& d) {
    std::size_t pos = 0;
    for (int y : d.labels)
        if (y > 0) ++pos;
    std::size_t neg = d.labels.size() - pos;
    return static_cast<double>(std::min(pos, neg)) / static_cast<double>(d.labels.size());
}

}  // namespace trimsvm
