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
#include <cctype>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hsmd/frame.hpp"
#include "hsmd/image_io.hpp"
#include "hsmd/metrics.hpp"
#include "hsmd/pipeline.hpp"

namespace hsmd::cdnet {

namespace fs = std::filesystem;

// Ground-truth grayscale labels.
inline constexpr std::uint8_t kLabelStatic = 0;
inline constexpr std::uint8_t kLabelShadow = 50;
inline constexpr std::uint8_t kLabelNonRoi = 85;
inline constexpr std::uint8_t kLabelUnknown = 170;
inline constexpr std::uint8_t kLabelMoving = 255;

/// One category/video pair discovered on disk.
struct VideoEntry {
    std::string category;
    std::string name;
    fs::path input_dir;
    fs::path groundtruth_dir;
    int roi_first = 1;  // 1-based frame numbers, inclusive
    int roi_last = 0;
    std::optional<fs::path> roi_mask_path;
};

/// Pixel-level scoring: moving counts toward TP/FN, static and shadow toward
/// FP/TN, non-ROI and unknown labels (and pixels outside the spatial ROI) are
/// excluded entirely.
inline metrics::Confusion frame_confusion(const MaskFrame& pred, const LabelFrame& gt,
                                          const MaskFrame* roi = nullptr) {
    if (!pred.same_size(gt) || (roi && !roi->same_size(gt)))
        throw std::invalid_argument("frame_confusion: dimension mismatch");
    metrics::Confusion c;
    for (std::size_t i = 0; i < gt.size(); ++i) {
        if (roi && roi->data()[i] == 0)
            continue;
        const std::uint8_t label = gt.data()[i];
        const bool positive = pred.data()[i] != 0;
        switch (label) {
            case kLabelNonRoi:
            case kLabelUnknown:
                break;
            case kLabelMoving:
                positive ? ++c.tp : ++c.fn;
                break;
            case kLabelStatic:
            case kLabelShadow:
                positive ? ++c.fp : ++c.tn;
                break;
            default:
                throw std::invalid_argument("frame_confusion: illegal label value " +
                                            std::to_string(label));
        }
    }
    return c;
}

namespace detail {

inline std::optional<int> trailing_number(const std::string& stem, const std::string& prefix) {
    if (stem.size() <= prefix.size() || stem.compare(0, prefix.size(), prefix) != 0)
        return std::nullopt;
    int value = 0;
    for (std::size_t i = prefix.size(); i < stem.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(stem[i])))
            return std::nullopt;
        value = value * 10 + (stem[i] - '0');
    }
    return value;
}

inline bool has_extension(const fs::path& p, std::initializer_list<const char*> exts) {
    std::string e = p.extension().string();
    for (char& c : e)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    for (const char* want : exts)
        if (e == want)
            return true;
    return false;
}

/// Frame number -> path, keyed by the digits after the prefix.
inline std::map<int, fs::path> numbered_files(const fs::path& dir, const std::string& prefix,
                                              std::initializer_list<const char*> exts) {
    std::map<int, fs::path> files;
    if (!fs::is_directory(dir))
        return files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file() || !has_extension(entry.path(), exts))
            continue;
        if (auto num = trailing_number(entry.path().stem().string(), prefix))
            files.emplace(*num, entry.path());
    }
    return files;
}

inline std::optional<std::pair<int, int>> parse_temporal_roi(const fs::path& file) {
    std::ifstream in(file);
    int first = 0, last = 0;
    if (!in || !(in >> first >> last))
        return std::nullopt;
    if (first > last)
        return std::nullopt;
    return std::make_pair(first, last);
}

inline std::vector<fs::path> sorted_subdirs(const fs::path& dir) {
    std::vector<fs::path> dirs;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_directory())
            dirs.push_back(entry.path());
    std::sort(dirs.begin(), dirs.end());
    return dirs;
}

}  // namespace detail

/// Walks root/category/video/{input, groundtruth, temporalROI.txt} and returns
/// one entry per complete video. Incomplete videos are skipped with a warning.
inline std::vector<VideoEntry> discover_dataset(const fs::path& root,
                                                std::vector<std::string>* warnings = nullptr) {
    if (!fs::is_directory(root))
        throw std::invalid_argument("discover_dataset: not a directory: " + root.string());
    auto warn = [warnings](std::string msg) {
        if (warnings)
            warnings->push_back(std::move(msg));
    };
    std::vector<VideoEntry> entries;
    for (const auto& category_dir : detail::sorted_subdirs(root)) {
        for (const auto& video_dir : detail::sorted_subdirs(category_dir)) {
            VideoEntry entry;
            entry.category = category_dir.filename().string();
            entry.name = video_dir.filename().string();
            entry.input_dir = video_dir / "input";
            entry.groundtruth_dir = video_dir / "groundtruth";

            const auto inputs =
                detail::numbered_files(entry.input_dir, "in", {".jpg", ".jpeg", ".png"});
            if (inputs.empty()) {
                warn(entry.category + "/" + entry.name + ": no input frames, skipped");
                continue;
            }
            const auto gts = detail::numbered_files(entry.groundtruth_dir, "gt", {".png"});
            if (gts.empty()) {
                warn(entry.category + "/" + entry.name + ": missing groundtruth, skipped");
                continue;
            }
            const auto roi = detail::parse_temporal_roi(video_dir / "temporalROI.txt");
            if (!roi) {
                warn(entry.category + "/" + entry.name + ": missing temporalROI.txt, skipped");
                continue;
            }
            entry.roi_first = roi->first;
            entry.roi_last = roi->second;
            for (const char* candidate : {"ROI.bmp", "ROI.png", "ROI.jpg"}) {
                if (fs::exists(video_dir / candidate)) {
                    entry.roi_mask_path = video_dir / candidate;
                    break;
                }
            }
            entries.push_back(std::move(entry));
        }
    }
    return entries;
}

struct FrameScore {
    int frame_number = 0;
    metrics::Confusion confusion;
};

struct VideoResult {
    std::string category;
    std::string name;
    std::size_t frames_total = 0;
    std::size_t frames_scored = 0;
    metrics::Confusion confusion;  // sum of the per-frame series
    std::vector<FrameScore> frame_scores;
    std::vector<double> ms_per_frame;

    double mean_ms() const {
        if (ms_per_frame.empty())
            return 0.0;
        double sum = 0.0;
        for (double v : ms_per_frame)
            sum += v;
        return sum / static_cast<double>(ms_per_frame.size());
    }
};

/// Runs the pipeline over every input frame in numeric order (the background
/// model observes the whole stream) and scores only frames inside the
/// temporal ROI. Decode failures abort the video.
inline VideoResult run_video(const VideoEntry& entry, const PipelineConfig& cfg) {
    const auto inputs = detail::numbered_files(entry.input_dir, "in", {".jpg", ".jpeg", ".png"});
    const auto gts = detail::numbered_files(entry.groundtruth_dir, "gt", {".png"});
    if (inputs.empty())
        throw std::runtime_error(entry.category + "/" + entry.name + ": no input frames");

    std::optional<MaskFrame> roi;
    if (entry.roi_mask_path) {
        GrayFrame raw = io::load_gray(*entry.roi_mask_path);
        MaskFrame bin(raw.width(), raw.height());
        for (std::size_t i = 0; i < raw.size(); ++i)
            bin.data()[i] = raw.data()[i] != 0 ? 255 : 0;
        roi = std::move(bin);
    }

    Pipeline pipeline(cfg);
    VideoResult result;
    result.category = entry.category;
    result.name = entry.name;

    for (const auto& [number, path] : inputs) {
        const GrayFrame gray = io::load_gray(path);
        StageTimings timings;
        const MaskFrame mask = pipeline.process(gray, &timings);
        ++result.frames_total;
        result.ms_per_frame.push_back(timings.total_ms());

        if (number < entry.roi_first || number > entry.roi_last)
            continue;  // warm-up / trailing frames stay unscored
        const auto gt_it = gts.find(number);
        if (gt_it == gts.end())
            throw std::runtime_error(entry.category + "/" + entry.name +
                                     ": missing ground truth for frame " +
                                     std::to_string(number));
        const GrayFrame gt_raw = io::load_gray(gt_it->second);
        LabelFrame gt = LabelFrame::from_data(gt_raw.width(), gt_raw.height(), gt_raw.data());
        const metrics::Confusion c =
            frame_confusion(mask, gt, roi && roi->same_size(gt) ? &*roi : nullptr);
        result.frame_scores.push_back({number, c});
        result.confusion += c;
        ++result.frames_scored;
    }
    return result;
}

/// Per-category aggregation, both ways: pooled confusion counts and the
/// unweighted mean of per-video metrics.
struct CategoryResult {
    std::string name;
    std::vector<std::string> videos;
    metrics::Confusion pooled;
    metrics::MetricSet pooled_metrics;
    metrics::MetricSet mean_metrics;
};

inline metrics::MetricSet mean_of_metric_sets(const std::vector<metrics::MetricSet>& sets) {
    metrics::MetricSet out;
    for (metrics::Metric m : metrics::kAllMetrics) {
        double sum = 0.0;
        int defined = 0;
        for (const auto& s : sets) {
            if (auto v = s.get(m)) {
                sum += *v;
                ++defined;
            }
        }
        if (defined > 0)
            out.set(m, sum / defined);
    }
    return out;
}

inline CategoryResult make_category_result(const std::string& name,
                                           const std::vector<VideoResult>& videos) {
    CategoryResult out;
    out.name = name;
    std::vector<metrics::MetricSet> per_video;
    for (const auto& v : videos) {
        if (v.category != name)
            continue;
        out.videos.push_back(v.name);
        out.pooled += v.confusion;
        per_video.push_back(metrics::compute_metrics(v.confusion));
    }
    out.pooled_metrics = metrics::compute_metrics(out.pooled);
    out.mean_metrics = mean_of_metric_sets(per_video);
    return out;
}

}  // namespace hsmd::cdnet
