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
#include <cstdint>
#include <string>
#include <vector>

#include "hsmd/frame.hpp"
#include "hsmd/parallel.hpp"

namespace hsmd::postfilter {

using MotionMatrix = Plane<float>;
using FilteredMatrix = Plane<float>;

enum class FilterMode { Average, Median };

/// Box window; weights are implicitly all ones scaled by 1/(width*height).
struct AveragingKernel {
    int width = 3;
    int height = 3;
};

struct FilterConfig {
    FilterMode mode = FilterMode::Average;
    AveragingKernel kernel;
    double binarise_threshold = 128.0;

    std::vector<std::string> validate() const {
        std::vector<std::string> errors;
        auto odd_pos = [](int v) { return v >= 1 && v % 2 == 1; };
        if (!odd_pos(kernel.width))
            errors.push_back("filter.width: must be odd and >= 1");
        if (!odd_pos(kernel.height))
            errors.push_back("filter.height: must be odd and >= 1");
        if (!(binarise_threshold >= 0.0 && binarise_threshold <= 256.0))
            errors.push_back("filter.threshold: must be in [0,256]");
        return errors;
    }
};

namespace detail {

inline void check_kernel(const MotionMatrix& m, const AveragingKernel& k) {
    if (k.width < 1 || k.height < 1 || k.width % 2 == 0 || k.height % 2 == 0)
        throw std::invalid_argument("kernel dimensions must be odd and >= 1");
    if (k.width > m.width() || k.height > m.height())
        throw std::invalid_argument("kernel larger than image");
}

}  // namespace detail

/// Box-mean convolution with zero padding at the borders.
inline FilteredMatrix average_filter(const MotionMatrix& m, const AveragingKernel& k,
                                     int threads = 1) {
    detail::check_kernel(m, k);
    FilteredMatrix out(m.width(), m.height());
    const int rx = k.width / 2;
    const int ry = k.height / 2;
    const double window = static_cast<double>(k.width) * k.height;
    parallel_for_rows(m.height(), threads, [&](int y0, int y1) {
        for (int y = y0; y < y1; ++y)
            for (int x = 0; x < m.width(); ++x) {
                double sum = 0.0;
                for (int dy = -ry; dy <= ry; ++dy)
                    for (int dx = -rx; dx <= rx; ++dx) {
                        const int nx = x + dx;
                        const int ny = y + dy;
                        if (m.contains(nx, ny))
                            sum += m.at(nx, ny);
                    }
                out.at(x, y) = static_cast<float>(sum / window);
            }
    });
    return out;
}

/// Window median with zero padding (out-of-bounds positions contribute 0).
inline FilteredMatrix median_filter(const MotionMatrix& m, const AveragingKernel& k,
                                    int threads = 1) {
    detail::check_kernel(m, k);
    FilteredMatrix out(m.width(), m.height());
    const int rx = k.width / 2;
    const int ry = k.height / 2;
    const std::size_t window = static_cast<std::size_t>(k.width) * k.height;
    parallel_for_rows(m.height(), threads, [&](int y0, int y1) {
        std::vector<float> values(window);
        for (int y = y0; y < y1; ++y)
            for (int x = 0; x < m.width(); ++x) {
                std::size_t n = 0;
                for (int dy = -ry; dy <= ry; ++dy)
                    for (int dx = -rx; dx <= rx; ++dx) {
                        const int nx = x + dx;
                        const int ny = y + dy;
                        values[n++] = m.contains(nx, ny) ? m.at(nx, ny) : 0.0f;
                    }
                auto mid = values.begin() + window / 2;
                std::nth_element(values.begin(), mid, values.end());
                out.at(x, y) = *mid;
            }
    });
    return out;
}

/// Linear rescale to [0,255]; an all-zero input stays all-zero.
inline MotionMatrix normalise(const FilteredMatrix& f) {
    MotionMatrix out(f.width(), f.height());
    float max = 0.0f;
    for (float v : f.data())
        max = std::max(max, v);
    if (max <= 0.0f)
        return out;
    const float scale = 255.0f / max;
    for (std::size_t i = 0; i < f.size(); ++i)
        out.data()[i] = f.data()[i] * scale;
    return out;
}

inline MaskFrame binarise(const MotionMatrix& m, double threshold) {
    MaskFrame out(m.width(), m.height());
    for (std::size_t i = 0; i < m.size(); ++i)
        out.data()[i] = m.data()[i] >= threshold ? 255 : 0;
    return out;
}

inline FilteredMatrix apply_filter(const MotionMatrix& m, const FilterConfig& cfg,
                                   int threads = 1) {
    return cfg.mode == FilterMode::Average ? average_filter(m, cfg.kernel, threads)
                                           : median_filter(m, cfg.kernel, threads);
}

}  // namespace hsmd::postfilter
