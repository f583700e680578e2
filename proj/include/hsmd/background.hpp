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

#include <bit>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "hsmd/frame.hpp"
#include "hsmd/parallel.hpp"

namespace hsmd::bgs {

enum class BsMode { FrameDiff, SampleConsensus };

/// Stage-1 configuration. FrameDiff thresholds |curr - prev|; SampleConsensus
/// keeps a per-pixel bank of (intensity, texture descriptor) samples and
/// classifies a pixel as background when enough samples agree.
struct BsConfig {
    BsMode mode = BsMode::SampleConsensus;
    int diff_threshold = 15;     // frame-diff zeroing threshold, [0,255]
    int samples = 20;            // samples per pixel (N)
    int match_threshold = 25;    // intensity distance for a sample match
    int hamming_threshold = 4;   // descriptor Hamming distance for a match
    int min_matches = 2;         // matching samples needed for background
    double replace_prob = 0.01;  // chance a background pixel refreshes a sample
    double neighbor_prob = 0.003;  // chance it also refreshes a 4-neighbour sample
    int lsbp_margin = 0;         // descriptor comparison margin
    int init_jitter = 10;        // intensity jitter of initial samples
    std::uint64_t seed = 42;

    std::vector<std::string> validate() const {
        std::vector<std::string> errors;
        auto in = [](int v, int lo, int hi) { return v >= lo && v <= hi; };
        if (!in(diff_threshold, 0, 255))
            errors.push_back("bs.diff_threshold: must be in [0,255]");
        if (samples < 1)
            errors.push_back("bs.samples: must be >= 1");
        if (min_matches < 0 || min_matches > samples)
            errors.push_back("bs.min_matches: must be in [0, bs.samples]");
        if (!in(match_threshold, 0, 255))
            errors.push_back("bs.match_threshold: must be in [0,255]");
        if (hamming_threshold < 0 || hamming_threshold > 32)
            errors.push_back("bs.hamming_threshold: must be in [0,32]");
        if (!(replace_prob >= 0.0 && replace_prob <= 1.0))
            errors.push_back("bs.replace_prob: must be in [0,1]");
        if (!(neighbor_prob >= 0.0 && neighbor_prob <= 1.0))
            errors.push_back("bs.neighbor_prob: must be in [0,1]");
        if (lsbp_margin < 0 || lsbp_margin > 255)
            errors.push_back("bs.lsbp_margin: must be in [0,255]");
        if (init_jitter < 0 || init_jitter > 255)
            errors.push_back("bs.init_jitter: must be in [0,255]");
        return errors;
    }
};

/// |curr - prev| with magnitudes below threshold forced to exactly 0.
inline DiffFrame frame_diff(const GrayFrame& curr, const GrayFrame& prev, int threshold) {
    if (!curr.same_size(prev))
        throw std::invalid_argument("frame_diff: dimension mismatch");
    DiffFrame out(curr.width(), curr.height());
    const std::uint8_t* a = curr.data().data();
    const std::uint8_t* b = prev.data().data();
    std::uint8_t* d = out.data().data();
    for (std::size_t i = 0; i < out.size(); ++i) {
        const int diff = std::abs(static_cast<int>(a[i]) - static_cast<int>(b[i]));
        d[i] = diff >= threshold ? static_cast<std::uint8_t>(diff) : 0;
    }
    return out;
}

namespace detail {

// Descriptor sampling offsets: bits 0..7 are the radius-1 ring, bits 8..23 the
// radius-2 ring, both in row-major order; bits 24..31 stay clear.
struct RingOffset {
    int dx, dy;
};
inline constexpr RingOffset kRingOffsets[24] = {
    {-1, -1}, {0, -1}, {1, -1}, {-1, 0}, {1, 0}, {-1, 1}, {0, 1}, {1, 1},
    {-2, -2}, {-1, -2}, {0, -2}, {1, -2}, {2, -2},
    {-2, -1}, {2, -1},
    {-2, 0},  {2, 0},
    {-2, 1},  {2, 1},
    {-2, 2},  {-1, 2}, {0, 2}, {1, 2}, {2, 2},
};

}  // namespace detail

/// Intensity-ring texture pattern: bit k is set when the k-th ring neighbour
/// exceeds the centre intensity by more than `margin`. Out-of-bounds
/// neighbours count as equal to the centre (bit clear).
inline std::uint32_t lsbp_descriptor(const GrayFrame& frame, int x, int y, int margin = 0) {
    if (!frame.contains(x, y))
        throw std::out_of_range("lsbp_descriptor: coordinates out of range");
    const int center = frame.at(x, y);
    std::uint32_t pattern = 0;
    for (int k = 0; k < 24; ++k) {
        const int nx = x + detail::kRingOffsets[k].dx;
        const int ny = y + detail::kRingOffsets[k].dy;
        if (frame.contains(nx, ny) && frame.at(nx, ny) > center + margin)
            pattern |= 1u << k;
    }
    return pattern;
}

inline Plane<std::uint32_t> lsbp_plane(const GrayFrame& frame, int margin, int threads = 1) {
    Plane<std::uint32_t> out(frame.width(), frame.height());
    parallel_for_rows(frame.height(), threads, [&](int y0, int y1) {
        for (int y = y0; y < y1; ++y)
            for (int x = 0; x < frame.width(); ++x)
                out.at(x, y) = lsbp_descriptor(frame, x, y, margin);
    });
    return out;
}

/// Per-pixel sample-consensus background model. Decisions for a whole frame
/// are taken against the pre-frame state; the stochastic sample refresh runs
/// afterwards in fixed pixel order from one seeded generator, so output is
/// reproducible and independent of the worker count.
class BgModel {
public:
    BgModel(const GrayFrame& first, const BsConfig& cfg)
        : cfg_(cfg), width_(first.width()), height_(first.height()), rng_(cfg.seed) {
        const std::size_t n = first.size() * static_cast<std::size_t>(cfg_.samples);
        intensities_.resize(n);
        descriptors_.resize(n);
        const auto desc = lsbp_plane(first, cfg_.lsbp_margin);
        std::uniform_int_distribution<int> jitter(-cfg_.init_jitter, cfg_.init_jitter);
        for (std::size_t p = 0; p < first.size(); ++p) {
            const int base = first.data()[p];
            const std::uint32_t d = desc.data()[p];
            const std::size_t bank = p * cfg_.samples;
            intensities_[bank] = static_cast<std::uint8_t>(base);  // sample 0 is exact
            descriptors_[bank] = d;
            for (int k = 1; k < cfg_.samples; ++k) {
                const int v = std::clamp(base + jitter(rng_), 0, 255);
                intensities_[bank + k] = static_cast<std::uint8_t>(v);
                descriptors_[bank + k] = d;
            }
        }
    }

    /// Classifies the frame against the current model (0 = background,
    /// 255 = foreground), then refreshes samples under background pixels.
    DiffFrame apply(const GrayFrame& frame, int threads = 1) {
        if (frame.width() != width_ || frame.height() != height_)
            throw std::invalid_argument("BgModel::apply: dimension mismatch");
        const auto desc = lsbp_plane(frame, cfg_.lsbp_margin, threads);
        DiffFrame out(width_, height_);
        parallel_for_rows(height_, threads, [&](int y0, int y1) {
            for (int y = y0; y < y1; ++y)
                for (int x = 0; x < width_; ++x) {
                    const bool bg = matches(x, y, frame.at(x, y), desc.at(x, y)) >= cfg_.min_matches;
                    out.at(x, y) = bg ? 0 : 255;
                }
        });
        update(frame, desc, out);
        return out;
    }

    /// Matching samples in the pixel's bank: |intensity delta| within the
    /// match threshold and descriptor Hamming distance within the bit budget.
    int matches(int x, int y, std::uint8_t intensity, std::uint32_t descriptor) const {
        const std::size_t bank =
            (static_cast<std::size_t>(y) * width_ + x) * cfg_.samples;
        int count = 0;
        for (int k = 0; k < cfg_.samples; ++k) {
            const int di = std::abs(static_cast<int>(intensities_[bank + k]) -
                                    static_cast<int>(intensity));
            if (di <= cfg_.match_threshold &&
                std::popcount(descriptors_[bank + k] ^ descriptor) <= cfg_.hamming_threshold)
                ++count;
        }
        return count;
    }

    int width() const { return width_; }
    int height() const { return height_; }
    int samples() const { return cfg_.samples; }
    const BsConfig& config() const { return cfg_; }

    std::uint8_t sample_intensity(int x, int y, int k) const {
        return intensities_[(static_cast<std::size_t>(y) * width_ + x) * cfg_.samples + k];
    }
    std::uint32_t sample_descriptor(int x, int y, int k) const {
        return descriptors_[(static_cast<std::size_t>(y) * width_ + x) * cfg_.samples + k];
    }

private:
    void update(const GrayFrame& frame, const Plane<std::uint32_t>& desc, const DiffFrame& fg) {
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (int y = 0; y < height_; ++y)
            for (int x = 0; x < width_; ++x) {
                if (fg.at(x, y) != 0)
                    continue;
                if (unit(rng_) < cfg_.replace_prob) {
                    const int slot = slot_index();
                    write_sample(x, y, slot, frame.at(x, y), desc.at(x, y));
                }
                if (unit(rng_) < cfg_.neighbor_prob) {
                    int nx = x, ny = y;
                    pick_neighbor(nx, ny);
                    const int slot = slot_index();
                    write_sample(nx, ny, slot, frame.at(x, y), desc.at(x, y));
                }
            }
    }

    int slot_index() {
        return std::uniform_int_distribution<int>(0, cfg_.samples - 1)(rng_);
    }

    void pick_neighbor(int& x, int& y) {
        static constexpr int kDx[4] = {0, 0, -1, 1};
        static constexpr int kDy[4] = {-1, 1, 0, 0};
        int candidates[4];
        int count = 0;
        for (int k = 0; k < 4; ++k) {
            const int nx = x + kDx[k];
            const int ny = y + kDy[k];
            if (nx >= 0 && ny >= 0 && nx < width_ && ny < height_)
                candidates[count++] = k;
        }
        const int pick = candidates[std::uniform_int_distribution<int>(0, count - 1)(rng_)];
        x += kDx[pick];
        y += kDy[pick];
    }

    void write_sample(int x, int y, int slot, std::uint8_t intensity, std::uint32_t descriptor) {
        const std::size_t i =
            (static_cast<std::size_t>(y) * width_ + x) * cfg_.samples + slot;
        intensities_[i] = intensity;
        descriptors_[i] = descriptor;
    }

    BsConfig cfg_;
    int width_;
    int height_;
    std::vector<std::uint8_t> intensities_;
    std::vector<std::uint32_t> descriptors_;
    std::mt19937_64 rng_;
};

}  // namespace hsmd::bgs
