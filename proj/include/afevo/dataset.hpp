#pragma once

/// @file dataset.hpp
/// @brief Small classification datasets: 2-D synthetic generators and CSV.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rng.hpp"

namespace afevo {

struct Dataset {
    std::size_t dims = 0;
    std::size_t classes = 0;
    std::vector<double> features; // row-major, size() * dims
    std::vector<int> labels;
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;

    std::size_t size() const noexcept { return labels.size(); }
    const double* row(std::size_t i) const noexcept { return features.data() + i * dims; }
};

/// Stratified 80/20 split. Each class keeps at least one training sample;
/// index lists are returned in ascending order.
inline void split_train_test(Dataset& data, std::uint64_t seed) {
    RngStream rng(seed);
    data.train.clear();
    data.test.clear();
    for (std::size_t c = 0; c < data.classes; ++c) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < data.size(); ++i) {
            if (static_cast<std::size_t>(data.labels[i]) == c) members.push_back(i);
        }
        if (members.empty()) continue;
        shuffle(members.begin(), members.end(), rng);
        const auto n_train = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::llround(0.8 * static_cast<double>(members.size()))));
        data.train.insert(data.train.end(), members.begin(), members.begin() + n_train);
        data.test.insert(data.test.end(), members.begin() + n_train, members.end());
    }
    std::sort(data.train.begin(), data.train.end());
    std::sort(data.test.begin(), data.test.end());
}

enum class SyntheticKind { TwoMoons, Circles, Spirals };

inline std::optional<SyntheticKind> synthetic_kind_from_name(std::string_view s) noexcept {
    if (s == "two-moons") return SyntheticKind::TwoMoons;
    if (s == "circles") return SyntheticKind::Circles;
    if (s == "spirals") return SyntheticKind::Spirals;
    return std::nullopt;
}

/// Two-class 2-D generator with isotropic gaussian noise.
///
///  - TwoMoons: class 0 on the upper unit half-circle around (0, 0), class 1 on
///    the lower unit half-circle around (1, 0.5).
///  - Circles: class 0 on radius 0.5, class 1 on radius 1.
///  - Spirals: two interleaved Archimedean spirals, one turn and a half each.
///
/// The first n/2 samples are class 0, angles evenly spaced.
inline Dataset make_synthetic(SyntheticKind kind, std::size_t n, double noise, std::uint64_t seed) {
    if (n < 8) throw std::invalid_argument("synthetic dataset needs n >= 8");
    Dataset d;
    d.dims = 2;
    d.classes = 2;
    d.features.reserve(2 * n);
    d.labels.reserve(n);
    const std::size_t n0 = n / 2;
    const std::size_t n1 = n - n0;
    RngStream rng(seed);
    const double pi = std::numbers::pi;
    for (std::size_t i = 0; i < n; ++i) {
        const int label = i < n0 ? 0 : 1;
        const std::size_t k = label == 0 ? i : i - n0;
        const std::size_t count = label == 0 ? n0 : n1;
        const double frac = count > 1 ? static_cast<double>(k) / static_cast<double>(count - 1) : 0.0;
        double x = 0.0;
        double y = 0.0;
        switch (kind) {
        case SyntheticKind::TwoMoons: {
            const double t = pi * frac;
            if (label == 0) {
                x = std::cos(t);
                y = std::sin(t);
            } else {
                x = 1.0 - std::cos(t);
                y = 0.5 - std::sin(t);
            }
            break;
        }
        case SyntheticKind::Circles: {
            const double t = 2.0 * pi * static_cast<double>(k) / static_cast<double>(count);
            const double r = label == 0 ? 0.5 : 1.0;
            x = r * std::cos(t);
            y = r * std::sin(t);
            break;
        }
        case SyntheticKind::Spirals: {
            const double t = 0.25 + 3.0 * pi * frac;
            const double r = t / (3.0 * pi);
            const double phase = label == 0 ? 0.0 : pi;
            x = r * std::cos(t + phase);
            y = r * std::sin(t + phase);
            break;
        }
        }
        if (noise > 0.0) {
            x += noise * rng.normal();
            y += noise * rng.normal();
        }
        d.features.push_back(x);
        d.features.push_back(y);
        d.labels.push_back(label);
    }
    split_train_test(d, mix64(seed));
    return d;
}

/// Malformed CSV input. line() is 1-based (the header is line 1).
class FormatError : public std::runtime_error {
  public:
    FormatError(std::size_t line, const std::string& reason)
        : std::runtime_error("line " + std::to_string(line) + ": " + reason), line_(line) {}

    std::size_t line() const noexcept { return line_; }

  private:
    std::size_t line_;
};

namespace detail {

inline std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

} // namespace detail

/// Parse CSV text with header `x1,...,xd,label`. The class count is one more
/// than the largest label. Throws FormatError.
inline Dataset parse_csv(std::string_view text, std::uint64_t split_seed) {
    Dataset d;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    bool header_seen = false;
    int max_label = -1;
    while (pos < text.size()) {
        auto eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.remove_prefix(3);
        if (line.empty()) continue;
        const auto cells = detail::split_commas(line);
        if (!header_seen) {
            if (cells.size() < 2) throw FormatError(line_no, "header needs at least one feature and a label");
            for (std::size_t j = 0; j + 1 < cells.size(); ++j) {
                if (cells[j] != "x" + std::to_string(j + 1)) {
                    throw FormatError(line_no, "expected header column x" + std::to_string(j + 1));
                }
            }
            if (cells.back() != "label") throw FormatError(line_no, "last header column must be 'label'");
            d.dims = cells.size() - 1;
            header_seen = true;
            continue;
        }
        if (cells.size() != d.dims + 1) {
            throw FormatError(line_no, "expected " + std::to_string(d.dims + 1) + " columns, got " +
                                           std::to_string(cells.size()));
        }
        for (std::size_t j = 0; j < d.dims; ++j) {
            double v = 0.0;
            const auto cell = cells[j];
            const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (ec != std::errc{} || ptr != cell.data() + cell.size() || cell.empty()) {
                throw FormatError(line_no, "non-numeric feature '" + std::string(cell) + "'");
            }
            if (!std::isfinite(v)) throw FormatError(line_no, "non-finite feature '" + std::string(cell) + "'");
            d.features.push_back(v);
        }
        const auto cell = cells.back();
        int label = 0;
        const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), label);
        if (ec != std::errc{} || ptr != cell.data() + cell.size() || cell.empty()) {
            throw FormatError(line_no, "label must be a base-10 integer, got '" + std::string(cell) + "'");
        }
        if (label < 0) throw FormatError(line_no, "negative label " + std::to_string(label));
        max_label = std::max(max_label, label);
        d.labels.push_back(label);
    }
    if (!header_seen) throw FormatError(1, "missing header");
    if (d.labels.empty()) throw FormatError(line_no + 1, "no data rows");
    d.classes = static_cast<std::size_t>(max_label) + 1;
    std::vector<bool> seen(d.classes, false);
    for (int label : d.labels) seen[static_cast<std::size_t>(label)] = true;
    for (std::size_t c = 0; c < d.classes; ++c) {
        if (!seen[c]) throw FormatError(line_no, "class " + std::to_string(c) + " has no rows");
    }
    split_train_test(d, split_seed);
    return d;
}

/// Read and parse a CSV file. Throws FormatError (line 0 if unreadable).
inline Dataset load_csv(const std::string& path, std::uint64_t split_seed) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError(0, "cannot open '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_csv(text, split_seed);
}

} // namespace afevo
