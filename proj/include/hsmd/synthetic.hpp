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

#include <cstdint>

#include "hsmd/frame.hpp"

namespace hsmd::synthetic {

/// A bright square ping-pongs horizontally over a static textured background.
/// Everything is a pure function of (config, frame index), so generated
/// sequences are identical across runs and platforms.
struct SequenceConfig {
    int width = 64;
    int height = 64;
    int frames = 60;
    int square = 12;          // square side length
    int step_px = 2;          // horizontal movement per frame
    std::uint8_t square_intensity = 230;
    std::uint64_t texture_seed = 7;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Static texture in [40, 140]: bright enough to differ from the square,
// varied enough to exercise the descriptor.
inline std::uint8_t texture_at(const SequenceConfig& cfg, int x, int y) {
    const std::uint64_t h = splitmix64(cfg.texture_seed ^ (static_cast<std::uint64_t>(y) << 32) ^
                                       static_cast<std::uint64_t>(x));
    return static_cast<std::uint8_t>(40 + h % 101);
}

// Triangle-wave x position, bouncing between the margins in step_px strides.
inline int square_x(const SequenceConfig& cfg, int frame) {
    const int lo = cfg.step_px;
    const int hi = cfg.width - cfg.square - cfg.step_px;
    const int travel = hi - lo;
    if (travel <= 0)
        return lo;
    const int steps = travel / cfg.step_px;
    const int phase = frame % (2 * steps);
    const int leg = phase < steps ? phase : 2 * steps - phase;
    return lo + leg * cfg.step_px;
}

inline int square_y(const SequenceConfig& cfg) {
    return (cfg.height - cfg.square) / 2;
}

}  // namespace detail

inline GrayFrame frame_at(const SequenceConfig& cfg, int index) {
    GrayFrame out(cfg.width, cfg.height);
    for (int y = 0; y < cfg.height; ++y)
        for (int x = 0; x < cfg.width; ++x)
            out.at(x, y) = detail::texture_at(cfg, x, y);
    const int sx = detail::square_x(cfg, index);
    const int sy = detail::square_y(cfg);
    for (int y = sy; y < sy + cfg.square; ++y)
        for (int x = sx; x < sx + cfg.square; ++x)
            out.at(x, y) = cfg.square_intensity;
    return out;
}

/// Pixels whose drawn content differs between frames `index-1` and `index`.
inline MaskFrame changed_pixels(const SequenceConfig& cfg, int index) {
    MaskFrame out(cfg.width, cfg.height, 0);
    if (index <= 0)
        return out;
    const GrayFrame a = frame_at(cfg, index - 1);
    const GrayFrame b = frame_at(cfg, index);
    for (std::size_t i = 0; i < out.size(); ++i)
        out.data()[i] = a.data()[i] != b.data()[i] ? 255 : 0;
    return out;
}

/// Motion ground truth for frame `index`: the union of the two most recent
/// content transitions, which is precisely the event set the detector's
/// direct and one-step-delayed paths are wired to report. Defined for
/// index >= 2; earlier frames have no complete transition pair.
inline MaskFrame truth_at(const SequenceConfig& cfg, int index) {
    MaskFrame out = changed_pixels(cfg, index);
    if (index >= 2) {
        const MaskFrame prev = changed_pixels(cfg, index - 1);
        for (std::size_t i = 0; i < out.size(); ++i)
            if (prev.data()[i])
                out.data()[i] = 255;
    }
    return out;
}

/// First frame index with a fully defined ground truth.
inline constexpr int kFirstScoredFrame = 2;

}  // namespace hsmd::synthetic
