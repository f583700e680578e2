// Copyright 2026 The HSMD Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hsmd::metrics {

struct Confusion {
    std::uint64_t tp = 0;
    std::uint64_t tn = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;

    Confusion& operator+=(const Confusion& o) {
        tp += o.tp;
        tn += o.tn;
        fp += o.fp;
        fn += o.fn;
        return *this;
    }
    friend Confusion operator+(Confusion a, const Confusion& b) { return a += b; }
    bool operator==(const Confusion&) const = default;

    std::uint64_t total() const { return tp + tn + fp + fn; }
};

template <typename Range>
Confusion accumulate(const Range& parts) {
    Confusion sum;
    for (const auto& c : parts)
        sum += c;
    return sum;
}

enum class Metric : int {
    Recall = 0,
    Specificity,
    Fpr,
    Fnr,
    Wcr,
    Ccr,
    Precision,
    F1,
};

inline constexpr int kMetricCount = 8;
inline constexpr std::array<Metric, kMetricCount> kAllMetrics = {
    Metric::Recall, Metric::Specificity, Metric::Fpr,       Metric::Fnr,
    Metric::Wcr,    Metric::Ccr,         Metric::Precision, Metric::F1,
};

inline const char* metric_name(Metric m) {
    switch (m) {
        case Metric::Recall: return "Re";
        case Metric::Specificity: return "Sp";
        case Metric::Fpr: return "FPR";
        case Metric::Fnr: return "FNR";
        case Metric::Wcr: return "WCR";
        case Metric::Ccr: return "CCR";
        case Metric::Precision: return "Pr";
        case Metric::F1: return "F1";
    }
    return "?";
}

enum class RankDirection { Ascending, Descending };

/// Fixed per-metric ordering: higher-is-better metrics rank descending,
/// error rates rank ascending.
inline constexpr RankDirection direction_of(Metric m) {
    switch (m) {
        case Metric::Fpr:
        case Metric::Fnr:
        case Metric::Wcr:
            return RankDirection::Ascending;
        default:
            return RankDirection::Descending;
    }
}

/// The eight scores; a metric whose denominator is zero is left undefined and
/// ranks strictly worse than any defined value.
struct MetricSet {
    std::optional<double> recall;
    std::optional<double> specificity;
    std::optional<double> fpr;
    std::optional<double> fnr;
    std::optional<double> wcr;
    std::optional<double> ccr;
    std::optional<double> precision;
    std::optional<double> f1;

    std::optional<double> get(Metric m) const {
        switch (m) {
            case Metric::Recall: return recall;
            case Metric::Specificity: return specificity;
            case Metric::Fpr: return fpr;
            case Metric::Fnr: return fnr;
            case Metric::Wcr: return wcr;
            case Metric::Ccr: return ccr;
            case Metric::Precision: return precision;
            case Metric::F1: return f1;
        }
        return std::nullopt;
    }

    void set(Metric m, std::optional<double> v) {
        switch (m) {
            case Metric::Recall: recall = v; break;
            case Metric::Specificity: specificity = v; break;
            case Metric::Fpr: fpr = v; break;
            case Metric::Fnr: fnr = v; break;
            case Metric::Wcr: wcr = v; break;
            case Metric::Ccr: ccr = v; break;
            case Metric::Precision: precision = v; break;
            case Metric::F1: f1 = v; break;
        }
    }
};

inline MetricSet compute_metrics(const Confusion& c) {
    MetricSet m;
    auto ratio = [](std::uint64_t num, std::uint64_t den) -> std::optional<double> {
        if (den == 0)
            return std::nullopt;
        return static_cast<double>(num) / static_cast<double>(den);
    };
    m.recall = ratio(c.tp, c.tp + c.fn);
    m.specificity = ratio(c.tn, c.tn + c.fp);
    m.fpr = ratio(c.fp, c.fp + c.tn);
    m.fnr = ratio(c.fn, c.fn + c.tp);
    m.wcr = ratio(c.fn + c.fp, c.total());
    m.ccr = ratio(c.tp + c.tn, c.total());
    m.precision = ratio(c.tp, c.tp + c.fp);
    // Pr + Re = 0 is a zero denominator like any other: F1 stays undefined.
    if (m.precision && m.recall && (*m.precision + *m.recall) > 0.0)
        m.f1 = 2.0 * (*m.precision) * (*m.recall) / (*m.precision + *m.recall);
    return m;
}

/// Per-metric ranks (1 = best, ties share the mean rank) and the average
/// rank R over all eight metrics.
struct RankTable {
    std::vector<std::string> methods;
    std::vector<std::array<double, kMetricCount>> ranks;  // [method][metric]
    std::vector<double> average;                          // R per method
};

namespace detail {

// Smaller key = better. Undefined values share the worst key.
inline double rank_key(std::optional<double> v, RankDirection dir) {
    if (!v)
        return std::numeric_limits<double>::infinity();
    return dir == RankDirection::Ascending ? *v : -*v;
}

inline std::vector<double> ranks_with_ties(const std::vector<double>& keys) {
    const std::size_t n = keys.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && keys[order[j + 1]] == keys[order[i]])
            ++j;
        const double mean_rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k)
            ranks[order[k]] = mean_rank;
        i = j + 1;
    }
    return ranks;
}

}  // namespace detail

inline RankTable rank_methods(const std::vector<std::string>& methods,
                              const std::vector<MetricSet>& rows) {
    if (methods.empty() || methods.size() != rows.size())
        throw std::invalid_argument("rank_methods: need one metric row per method");
    RankTable table;
    table.methods = methods;
    table.ranks.assign(methods.size(), {});
    table.average.assign(methods.size(), 0.0);
    for (Metric m : kAllMetrics) {
        std::vector<double> keys(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i)
            keys[i] = detail::rank_key(rows[i].get(m), direction_of(m));
        const auto ranks = detail::ranks_with_ties(keys);
        for (std::size_t i = 0; i < rows.size(); ++i)
            table.ranks[i][static_cast<int>(m)] = ranks[i];
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        double sum = 0.0;
        for (double r : table.ranks[i])
            sum += r;
        table.average[i] = sum / kMetricCount;
    }
    return table;
}

/// Mean of a method's per-category average ranks. Every method must appear in
/// every category.
struct CrossCategoryRank {
    std::vector<std::string> methods;
    std::vector<double> rc;
};

inline CrossCategoryRank rank_across_categories(const std::vector<RankTable>& categories) {
    if (categories.empty())
        throw std::invalid_argument("rank_across_categories: no categories");
    const auto& methods = categories.front().methods;
    CrossCategoryRank out;
    out.methods = methods;
    out.rc.assign(methods.size(), 0.0);
    for (const auto& table : categories) {
        for (std::size_t i = 0; i < methods.size(); ++i) {
            const auto it = std::find(table.methods.begin(), table.methods.end(), methods[i]);
            if (it == table.methods.end())
                throw std::invalid_argument("rank_across_categories: method missing from a category: " +
                                            methods[i]);
            out.rc[i] += table.average[static_cast<std::size_t>(it - table.methods.begin())];
        }
        if (table.methods.size() != methods.size())
            throw std::invalid_argument("rank_across_categories: inconsistent method sets");
    }
    for (double& v : out.rc)
        v /= static_cast<double>(categories.size());
    return out;
}

}  // namespace hsmd::metrics
