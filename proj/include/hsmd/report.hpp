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

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hsmd/cdnet.hpp"
#include "hsmd/metrics.hpp"
#include "hsmd/pipeline.hpp"

namespace hsmd::report {

namespace fs = std::filesystem;
using nlohmann::json;

inline constexpr const char* kMetricColumns = "Re,Sp,FPR,FNR,WCR,CCR,Pr,F1";

namespace detail {

inline std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

inline std::string csv_cell(const std::optional<double>& v) {
    return v ? fmt(*v) : std::string();
}

inline void append_metric_cells(std::string& row, const metrics::MetricSet& m) {
    for (metrics::Metric metric : metrics::kAllMetrics)
        row += "," + csv_cell(m.get(metric));
}

inline json metrics_json(const metrics::MetricSet& m) {
    json j;
    for (metrics::Metric metric : metrics::kAllMetrics) {
        const auto v = m.get(metric);
        j[metrics::metric_name(metric)] = v ? json(*v) : json(nullptr);
    }
    return j;
}

inline json confusion_json(const metrics::Confusion& c) {
    return json{{"tp", c.tp}, {"tn", c.tn}, {"fp", c.fp}, {"fn", c.fn}};
}

}  // namespace detail

inline void write_text(const fs::path& path, const std::string& content) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write report: " + path.string());
    out << content;
}

struct BenchFailure {
    std::string category;
    std::string video;
    std::string error;
};

struct BenchResult {
    std::vector<cdnet::VideoResult> videos;
    std::vector<cdnet::CategoryResult> categories;
    metrics::Confusion overall_pooled;
    metrics::MetricSet overall_pooled_metrics;
    metrics::MetricSet overall_mean_metrics;
    std::vector<BenchFailure> failures;
};

/// Runs every discovered video (optionally restricted to some categories) and
/// aggregates per category and overall. Failed videos are recorded and
/// excluded from aggregation.
inline BenchResult run_benchmark(const PipelineConfig& cfg, const fs::path& dataset_root,
                                 const std::vector<std::string>& category_filter = {},
                                 std::vector<std::string>* warnings = nullptr) {
    auto entries = cdnet::discover_dataset(dataset_root, warnings);
    if (!category_filter.empty()) {
        std::erase_if(entries, [&](const cdnet::VideoEntry& e) {
            return std::find(category_filter.begin(), category_filter.end(), e.category) ==
                   category_filter.end();
        });
    }
    if (entries.empty())
        throw std::runtime_error("no usable videos under dataset root: " + dataset_root.string());

    BenchResult result;
    std::set<std::string> category_names;
    for (const auto& entry : entries) {
        try {
            result.videos.push_back(cdnet::run_video(entry, cfg));
            category_names.insert(entry.category);
        } catch (const std::exception& e) {
            result.failures.push_back({entry.category, entry.name, e.what()});
        }
    }
    std::vector<metrics::MetricSet> per_video;
    for (const auto& v : result.videos) {
        result.overall_pooled += v.confusion;
        per_video.push_back(metrics::compute_metrics(v.confusion));
    }
    result.overall_pooled_metrics = metrics::compute_metrics(result.overall_pooled);
    result.overall_mean_metrics = cdnet::mean_of_metric_sets(per_video);
    for (const auto& name : category_names)
        result.categories.push_back(cdnet::make_category_result(name, result.videos));
    return result;
}

inline std::string videos_csv(const BenchResult& r) {
    std::string out = std::string("category,video,frames_total,frames_scored,tp,tn,fp,fn,") +
                      kMetricColumns + ",mean_ms_per_frame\n";
    for (const auto& v : r.videos) {
        std::string row = v.category + "," + v.name + "," + std::to_string(v.frames_total) +
                          "," + std::to_string(v.frames_scored) + "," +
                          std::to_string(v.confusion.tp) + "," + std::to_string(v.confusion.tn) +
                          "," + std::to_string(v.confusion.fp) + "," +
                          std::to_string(v.confusion.fn);
        detail::append_metric_cells(row, metrics::compute_metrics(v.confusion));
        row += "," + detail::fmt(v.mean_ms());
        out += row + "\n";
    }
    return out;
}

inline std::string categories_csv(const BenchResult& r) {
    std::string out =
        std::string("category,videos,aggregation,tp,tn,fp,fn,") + kMetricColumns + "\n";
    auto emit = [&out](const std::string& name, std::size_t videos, const std::string& agg,
                       const metrics::Confusion* pooled, const metrics::MetricSet& m) {
        std::string row = name + "," + std::to_string(videos) + "," + agg;
        if (pooled)
            row += "," + std::to_string(pooled->tp) + "," + std::to_string(pooled->tn) + "," +
                   std::to_string(pooled->fp) + "," + std::to_string(pooled->fn);
        else
            row += ",,,,";
        detail::append_metric_cells(row, m);
        out += row + "\n";
    };
    for (const auto& c : r.categories) {
        emit(c.name, c.videos.size(), "pooled", &c.pooled, c.pooled_metrics);
        emit(c.name, c.videos.size(), "mean_of_videos", nullptr, c.mean_metrics);
    }
    emit("overall", r.videos.size(), "pooled", &r.overall_pooled, r.overall_pooled_metrics);
    emit("overall", r.videos.size(), "mean_of_videos", nullptr, r.overall_mean_metrics);
    return out;
}

inline json bench_json(const BenchResult& r, const fs::path& dataset_root) {
    json j;
    j["dataset"] = dataset_root.string();
    j["videos"] = json::array();
    for (const auto& v : r.videos) {
        j["videos"].push_back({{"category", v.category},
                               {"video", v.name},
                               {"frames_total", v.frames_total},
                               {"frames_scored", v.frames_scored},
                               {"confusion", detail::confusion_json(v.confusion)},
                               {"metrics", detail::metrics_json(metrics::compute_metrics(v.confusion))},
                               {"mean_ms_per_frame", v.mean_ms()}});
    }
    j["categories"] = json::array();
    for (const auto& c : r.categories) {
        j["categories"].push_back({{"name", c.name},
                                   {"videos", c.videos},
                                   {"pooled",
                                    {{"confusion", detail::confusion_json(c.pooled)},
                                     {"metrics", detail::metrics_json(c.pooled_metrics)}}},
                                   {"mean_of_videos",
                                    {{"metrics", detail::metrics_json(c.mean_metrics)}}}});
    }
    j["overall"] = {{"pooled",
                     {{"confusion", detail::confusion_json(r.overall_pooled)},
                      {"metrics", detail::metrics_json(r.overall_pooled_metrics)}}},
                    {"mean_of_videos", {{"metrics", detail::metrics_json(r.overall_mean_metrics)}}}};
    j["failures"] = json::array();
    for (const auto& f : r.failures)
        j["failures"].push_back({{"category", f.category}, {"video", f.video}, {"error", f.error}});
    return j;
}

inline void write_bench_reports(const BenchResult& r, const fs::path& out_dir,
                                const std::vector<std::string>& formats,
                                const fs::path& dataset_root) {
    fs::create_directories(out_dir);
    const bool csv = std::find(formats.begin(), formats.end(), "csv") != formats.end();
    const bool js = std::find(formats.begin(), formats.end(), "json") != formats.end();
    if (csv) {
        write_text(out_dir / "videos.csv", videos_csv(r));
        write_text(out_dir / "categories.csv", categories_csv(r));
    }
    if (js)
        write_text(out_dir / "bench.json", bench_json(r, dataset_root).dump(2) + "\n");
}

/// Fixture table: one named method per row with its eight metric values.
struct FixtureTable {
    std::vector<std::string> categories;  // empty when the file has no category column
    std::vector<std::string> methods;
    std::vector<metrics::MetricSet> rows;
};

/// Parses `[category,]method,Re,Sp,FPR,FNR,WCR,CCR,Pr,F1` CSV. Empty or `nan`
/// cells mark a metric as undefined.
inline FixtureTable load_fixtures(const fs::path& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open fixtures file: " + path.string());
    FixtureTable table;
    std::string line;
    bool with_category = false;
    bool header_seen = false;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#')
            continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ','))
            cells.push_back(cell);
        while (cells.size() < (header_seen && with_category ? 10u : 9u))
            cells.push_back("");
        if (!header_seen) {
            header_seen = true;
            std::string first = cells.empty() ? "" : cells[0];
            for (char& ch : first)
                ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
            with_category = first == "category";
            if (first == "method" || with_category)
                continue;  // header row consumed
        }
        const std::size_t base = with_category ? 1 : 0;
        if (cells.size() < base + 9)
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                     ": expected " + std::to_string(base + 9) + " columns");
        if (with_category)
            table.categories.push_back(cells[0]);
        table.methods.push_back(cells[base]);
        metrics::MetricSet row;
        for (int m = 0; m < metrics::kMetricCount; ++m) {
            const std::string& v = cells[base + 1 + m];
            if (v.empty() || v == "nan" || v == "NaN")
                continue;
            try {
                row.set(static_cast<metrics::Metric>(m), std::stod(v));
            } catch (const std::exception&) {
                throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                         ": bad metric value '" + v + "'");
            }
        }
        table.rows.push_back(row);
    }
    if (table.methods.empty())
        throw std::runtime_error("fixtures file has no data rows: " + path.string());
    return table;
}

inline std::string rank_csv(const metrics::RankTable& table) {
    std::string out = "method,R";
    for (metrics::Metric m : metrics::kAllMetrics)
        out += std::string(",rank_") + metrics::metric_name(m);
    out += "\n";
    for (std::size_t i = 0; i < table.methods.size(); ++i) {
        out += table.methods[i] + "," + detail::fmt(table.average[i]);
        for (double r : table.ranks[i])
            out += "," + detail::fmt(r);
        out += "\n";
    }
    return out;
}

inline json rank_json(const metrics::RankTable& table) {
    json j = json::array();
    for (std::size_t i = 0; i < table.methods.size(); ++i) {
        json ranks;
        for (metrics::Metric m : metrics::kAllMetrics)
            ranks[metrics::metric_name(m)] = table.ranks[i][static_cast<int>(m)];
        j.push_back({{"method", table.methods[i]}, {"R", table.average[i]}, {"ranks", ranks}});
    }
    return j;
}

}  // namespace hsmd::report
