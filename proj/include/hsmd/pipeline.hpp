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
#include <chrono>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "hsmd/background.hpp"
#include "hsmd/frame.hpp"
#include "hsmd/postfilter.hpp"
#include "hsmd/snn.hpp"

namespace hsmd {

/// Everything a pipeline run needs besides the frame source.
struct PipelineConfig {
    std::string source;  // device index, video path, sequence dir or dataset root
    bgs::BsConfig bs;
    snn::NeuronParams neuron;
    snn::SynapseWeights weights;
    double current_scale = 17.5;  // pixel-to-current conversion constant
    int substeps = 1;             // simulation timesteps per frame
    postfilter::FilterConfig filter;
    int threads = 1;
    std::uint64_t seed = 42;
    double scale = 1.0;  // optional input rescale, 1 = native resolution
    std::string output_dir = "hsmd_out";
    std::vector<std::string> report_formats = {"csv", "json"};

    std::vector<std::string> validate() const {
        std::vector<std::string> errors = bs.validate();
        auto append = [&errors](std::vector<std::string> more) {
            errors.insert(errors.end(), more.begin(), more.end());
        };
        append(neuron.validate());
        append(weights.validate());
        append(filter.validate());
        if (!(std::isfinite(current_scale) && current_scale > 0))
            errors.push_back("snn.c: must be finite and > 0");
        if (substeps < 1)
            errors.push_back("snn.substeps: must be >= 1");
        if (threads < 1)
            errors.push_back("threads: must be >= 1");
        if (!(scale > 0.0))
            errors.push_back("scale: must be > 0");
        for (const auto& f : report_formats)
            if (f != "csv" && f != "json")
                errors.push_back("report.formats: unknown format '" + f + "'");
        return errors;
    }
};

struct StageTimings {
    double bs_ms = 0.0;
    double snn_ms = 0.0;
    double filter_ms = 0.0;
    double total_ms() const { return bs_ms + snn_ms + filter_ms; }
};

struct RunReport {
    std::size_t frames = 0;
    double mean_ms = 0.0;
    double median_ms = 0.0;
    double p95_ms = 0.0;
    double fps = 0.0;
    StageTimings mean_stage_ms;
    double mean_l4_spikes = 0.0;  // spike-rate summary
};

/// Grayscale in, binary motion mask out: background subtraction, spiking
/// layers, averaging filter, normalisation, binarisation. Owns all temporal
/// state; one instance per stream.
class Pipeline {
public:
    explicit Pipeline(const PipelineConfig& cfg) : cfg_(cfg) {}

    const PipelineConfig& config() const { return cfg_; }

    MaskFrame process(const GrayFrame& input, StageTimings* timings = nullptr) {
        using clock = std::chrono::steady_clock;
        const GrayFrame frame = scale_nearest(input, cfg_.scale);

        const auto t0 = clock::now();
        const DiffFrame diff = subtract(frame);
        const auto t1 = clock::now();

        if (!net_)
            net_.emplace(frame.width(), frame.height(), cfg_.neuron, cfg_.weights,
                         cfg_.current_scale);
        const snn::SpikeCountField counts = net_->run_frame(diff, cfg_.substeps, cfg_.threads);
        const auto t2 = clock::now();

        postfilter::MotionMatrix motion(counts.width(), counts.height());
        for (std::size_t i = 0; i < counts.size(); ++i)
            motion.data()[i] = static_cast<float>(counts.data()[i]);
        const auto filtered = postfilter::apply_filter(motion, cfg_.filter, cfg_.threads);
        const auto normalised = postfilter::normalise(filtered);
        MaskFrame mask = postfilter::binarise(normalised, cfg_.filter.binarise_threshold);
        const auto t3 = clock::now();

        using fms = std::chrono::duration<double, std::milli>;
        if (timings) {
            timings->bs_ms = fms(t1 - t0).count();
            timings->snn_ms = fms(t2 - t1).count();
            timings->filter_ms = fms(t3 - t2).count();
        }
        last_spike_total_ = 0;
        for (auto c : counts.data())
            last_spike_total_ += c;
        return mask;
    }

    const snn::Network* network() const { return net_ ? &*net_ : nullptr; }
    std::uint64_t last_spike_total() const { return last_spike_total_; }

private:
    DiffFrame subtract(const GrayFrame& frame) {
        if (cfg_.bs.mode == bgs::BsMode::FrameDiff) {
            if (!prev_ || !prev_->same_size(frame))
                prev_ = frame;  // first frame differences against itself
            DiffFrame diff = bgs::frame_diff(frame, *prev_, cfg_.bs.diff_threshold);
            prev_ = frame;
            return diff;
        }
        if (!model_ || model_->width() != frame.width() || model_->height() != frame.height()) {
            bgs::BsConfig bs = cfg_.bs;
            bs.seed = cfg_.seed;
            model_.emplace(frame, bs);
        }
        return model_->apply(frame, cfg_.threads);
    }

    PipelineConfig cfg_;
    std::optional<GrayFrame> prev_;
    std::optional<bgs::BgModel> model_;
    std::optional<snn::Network> net_;
    std::uint64_t last_spike_total_ = 0;
};

inline RunReport summarize_run(const std::vector<StageTimings>& frames) {
    RunReport report;
    report.frames = frames.size();
    if (frames.empty())
        return report;
    std::vector<double> totals;
    totals.reserve(frames.size());
    for (const auto& t : frames) {
        totals.push_back(t.total_ms());
        report.mean_stage_ms.bs_ms += t.bs_ms;
        report.mean_stage_ms.snn_ms += t.snn_ms;
        report.mean_stage_ms.filter_ms += t.filter_ms;
    }
    const double n = static_cast<double>(frames.size());
    report.mean_stage_ms.bs_ms /= n;
    report.mean_stage_ms.snn_ms /= n;
    report.mean_stage_ms.filter_ms /= n;
    std::sort(totals.begin(), totals.end());
    report.mean_ms = std::accumulate(totals.begin(), totals.end(), 0.0) / n;
    report.median_ms = totals[totals.size() / 2];
    report.p95_ms = totals[static_cast<std::size_t>(std::min(
        n - 1.0, std::ceil(0.95 * n) - 1.0))];
    report.fps = report.mean_ms > 0.0 ? 1000.0 / report.mean_ms : 0.0;
    return report;
}

}  // namespace hsmd
