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
#include <cassert>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace hsmd {

/// Row-major single-channel plane. All pixel stages (grayscale frames, masks,
/// difference frames, currents, spike planes, motion matrices) share this
/// container with different value types.
template <typename T>
class Plane {
public:
    Plane() = default;

    Plane(int width, int height, T fill = T{})
        : width_(width), height_(height) {
        if (width <= 0 || height <= 0)
            throw std::invalid_argument("Plane: dimensions must be positive");
        data_.assign(static_cast<std::size_t>(width) * height, fill);
    }

    static Plane from_data(int width, int height, std::vector<T> data) {
        Plane p(width, height);
        if (data.size() != p.data_.size())
            throw std::invalid_argument("Plane: data length does not match dimensions");
        p.data_ = std::move(data);
        return p;
    }

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    T& at(int x, int y) {
        assert(contains(x, y));
        return data_[static_cast<std::size_t>(y) * width_ + x];
    }
    const T& at(int x, int y) const {
        assert(contains(x, y));
        return data_[static_cast<std::size_t>(y) * width_ + x];
    }

    bool contains(int x, int y) const {
        return x >= 0 && y >= 0 && x < width_ && y < height_;
    }

    T* row(int y) { return data_.data() + static_cast<std::size_t>(y) * width_; }
    const T* row(int y) const { return data_.data() + static_cast<std::size_t>(y) * width_; }

    std::vector<T>& data() { return data_; }
    const std::vector<T>& data() const { return data_; }

    template <typename U>
    bool same_size(const Plane<U>& other) const {
        return width_ == other.width() && height_ == other.height();
    }

    bool operator==(const Plane&) const = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<T> data_;
};

using GrayFrame = Plane<std::uint8_t>;
using MaskFrame = Plane<std::uint8_t>;   // values restricted to {0, 255}
using DiffFrame = Plane<std::uint8_t>;   // 0 = background, >0 = foreground evidence
using LabelFrame = Plane<std::uint8_t>;  // ground-truth labels {0,50,85,170,255}

/// Interleaved 8-bit RGB frame, row-major, 3 bytes per pixel.
struct RgbFrame {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;

    RgbFrame() = default;
    RgbFrame(int w, int h) : width(w), height(h) {
        if (w <= 0 || h <= 0)
            throw std::invalid_argument("RgbFrame: dimensions must be positive");
        data.assign(static_cast<std::size_t>(w) * h * 3, 0);
    }

    std::uint8_t* pixel(int x, int y) {
        assert(x >= 0 && y >= 0 && x < width && y < height);
        return data.data() + (static_cast<std::size_t>(y) * width + x) * 3;
    }
    const std::uint8_t* pixel(int x, int y) const {
        assert(x >= 0 && y >= 0 && x < width && y < height);
        return data.data() + (static_cast<std::size_t>(y) * width + x) * 3;
    }

    bool valid() const {
        return width > 0 && height > 0 &&
               data.size() == static_cast<std::size_t>(width) * height * 3;
    }
};

/// BT.601 luma for one pixel, round-half-up, clamped to [0,255].
inline std::uint8_t luma601(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    const double y = 0.299 * r + 0.587 * g + 0.114 * b;
    const double rounded = std::floor(y + 0.5);
    return static_cast<std::uint8_t>(std::clamp(rounded, 0.0, 255.0));
}

inline GrayFrame to_grayscale(const RgbFrame& frame) {
    if (!frame.valid())
        throw std::invalid_argument("to_grayscale: invalid RgbFrame");
    GrayFrame out(frame.width, frame.height);
    const std::uint8_t* src = frame.data.data();
    std::uint8_t* dst = out.data().data();
    const std::size_t n = out.size();
    for (std::size_t i = 0; i < n; ++i, src += 3)
        dst[i] = luma601(src[0], src[1], src[2]);
    return out;
}

/// Channel replication; inverse of the 8-bit grayscale promotion rule.
inline RgbFrame to_rgb(const GrayFrame& gray) {
    RgbFrame out(gray.width(), gray.height());
    const std::uint8_t* src = gray.data().data();
    std::uint8_t* dst = out.data.data();
    for (std::size_t i = 0; i < gray.size(); ++i) {
        dst[3 * i] = dst[3 * i + 1] = dst[3 * i + 2] = src[i];
    }
    return out;
}

/// Nearest-neighbour rescale; factor 1 returns the input unchanged.
inline GrayFrame scale_nearest(const GrayFrame& in, double factor) {
    if (!(factor > 0.0))
        throw std::invalid_argument("scale_nearest: factor must be > 0");
    if (factor == 1.0)
        return in;
    const int w = std::max(1, static_cast<int>(std::lround(in.width() * factor)));
    const int h = std::max(1, static_cast<int>(std::lround(in.height() * factor)));
    GrayFrame out(w, h);
    for (int y = 0; y < h; ++y) {
        const int sy = std::min(in.height() - 1, static_cast<int>(y / factor));
        for (int x = 0; x < w; ++x) {
            const int sx = std::min(in.width() - 1, static_cast<int>(x / factor));
            out.at(x, y) = in.at(sx, sy);
        }
    }
    return out;
}

inline bool is_binary_mask(const MaskFrame& mask) {
    return std::all_of(mask.data().begin(), mask.data().end(),
                       [](std::uint8_t v) { return v == 0 || v == 255; });
}

}  // namespace hsmd
