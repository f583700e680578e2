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

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "hsmd/frame.hpp"
#include "hsmd/parallel.hpp"

namespace hsmd::snn {

using CurrentField = Plane<float>;
using SpikeField = Plane<std::uint8_t>;        // 0/1 per pixel
using SpikeCountField = Plane<std::uint32_t>;  // spikes accumulated over a frame

/// Leaky integrate-and-fire constants. Times are in milliseconds, potentials
/// in millivolts; the injected current is dimensionless and scaled by the
/// resistance gain.
struct NeuronParams {
    double tau_m_ms = 10.0;
    double resistance = 1.0;
    double e_leak_mv = -70.0;
    double v_reset_mv = -70.0;
    double v_min_mv = -70.0;
    double v_threshold_mv = -55.0;
    double t_ref_ms = 2.0;
    double dt_ms = 10.0;

    double decay() const { return std::exp(-dt_ms / tau_m_ms); }

    std::vector<std::string> validate() const {
        std::vector<std::string> errors;
        if (!(tau_m_ms > 0))
            errors.push_back("snn.tau_m: must be > 0");
        if (!(dt_ms > 0))
            errors.push_back("snn.dt: must be > 0");
        if (!(v_threshold_mv > v_reset_mv))
            errors.push_back("snn.v_threshold: must be > snn.v_reset");
        if (!(v_min_mv <= v_reset_mv))
            errors.push_back("snn.v_min: must be <= snn.v_reset");
        if (!(t_ref_ms >= 0))
            errors.push_back("snn.t_ref: must be >= 0");
        if (!std::isfinite(resistance))
            errors.push_back("snn.resistance: must be finite");
        return errors;
    }
};

struct SynapseWeights {
    double pixel_gain = 8.0;      // scales the encoded current into layer 2
    double spike_weight = 1555.0;  // spike-to-current weight between layers

    std::vector<std::string> validate() const {
        std::vector<std::string> errors;
        if (!(std::isfinite(pixel_gain) && pixel_gain > 0))
            errors.push_back("snn.w_p2i: must be finite and > 0");
        if (!(std::isfinite(spike_weight) && spike_weight > 0))
            errors.push_back("snn.w_syn: must be finite and > 0");
        return errors;
    }
};

struct NeuronState {
    double v_m;
    double refractory_ms = 0.0;
    bool spiked = false;
};

namespace detail {

// One exact exponential step: V' = V_inf + (V - V_inf) * e^(-dt/tau) with
// V_inf = E_L + R*I, floor at v_min, fire-and-reset on crossing v_threshold.
// A step is swallowed by the refractory period only while time remains in it
// after the step elapses; a refractory period shorter than the step never
// suppresses the following step.
inline bool lif_advance(double& v, double& refractory_ms, double current,
                        const NeuronParams& p, double decay) {
    if (refractory_ms > 0.0) {
        refractory_ms = std::max(0.0, refractory_ms - p.dt_ms);
        if (refractory_ms > 0.0) {
            v = p.v_reset_mv;
            return false;
        }
    }
    const double v_inf = p.e_leak_mv + p.resistance * current;
    v = v_inf + (v - v_inf) * decay;
    if (v < p.v_min_mv)
        v = p.v_min_mv;
    if (v >= p.v_threshold_mv) {
        v = p.v_reset_mv;
        refractory_ms = p.t_ref_ms;
        return true;
    }
    return false;
}

}  // namespace detail

/// Advances one neuron by one timestep. Returns true when it fired.
inline bool lif_step(NeuronState& state, double current, const NeuronParams& params) {
    if (!std::isfinite(current))
        throw std::invalid_argument("lif_step: non-finite input current");
    state.spiked = detail::lif_advance(state.v_m, state.refractory_ms, current,
                                       params, params.decay());
    return state.spiked;
}

/// Difference intensity to injected current: i = value * c.
inline CurrentField encode_currents(const DiffFrame& diff, double conversion) {
    CurrentField out(diff.width(), diff.height());
    const std::uint8_t* src = diff.data().data();
    float* dst = out.data().data();
    for (std::size_t i = 0; i < out.size(); ++i)
        dst[i] = static_cast<float>(src[i] * conversion);
    return out;
}

/// Three per-pixel neuron layers with 1:1 wiring. Layer 2 integrates the
/// encoded pixel current; layer 3 replays layer-2 spikes one timestep late
/// through its buffer; layer 4 fuses the direct layer-2 path with the delayed
/// layer-3 path. No cross-pixel synapses exist, so pixels advance
/// independently and row-partitioned execution is bit-reproducible.
class Network {
public:
    Network(int width, int height, const NeuronParams& params,
            const SynapseWeights& weights, double current_scale = 17.5)
        : width_(width),
          height_(height),
          params_(params),
          weights_(weights),
          current_scale_(current_scale),
          decay_(params.decay()),
          v2_(width, height, params.e_leak_mv),
          v3_(width, height, params.e_leak_mv),
          v4_(width, height, params.e_leak_mv),
          ref2_(width, height, 0.0),
          ref3_(width, height, 0.0),
          ref4_(width, height, 0.0),
          spk2_(width, height, 0),
          spk3_(width, height, 0),
          spk4_(width, height, 0),
          l3_buffer_(width, height, 0) {}

    /// One simulation timestep against a fixed current field. Returns the
    /// layer-4 spike plane.
    SpikeField step(const CurrentField& currents, int threads = 1) {
        if (!currents.same_size(v2_))
            throw std::invalid_argument("Network::step: dimension mismatch");
        parallel_for_rows(height_, threads, [&](int y0, int y1) {
            const std::size_t begin = static_cast<std::size_t>(y0) * width_;
            const std::size_t end = static_cast<std::size_t>(y1) * width_;
            const float* in = currents.data().data();
            const double w_in = weights_.pixel_gain;
            const double w_syn = weights_.spike_weight;
            for (std::size_t i = begin; i < end; ++i) {
                const bool s2 = detail::lif_advance(v2_.data()[i], ref2_.data()[i],
                                                    w_in * in[i], params_, decay_);
                const bool s3 = detail::lif_advance(v3_.data()[i], ref3_.data()[i],
                                                    w_syn * l3_buffer_.data()[i],
                                                    params_, decay_);
                const bool s4 = detail::lif_advance(
                    v4_.data()[i], ref4_.data()[i],
                    w_syn * (s2 ? 1.0 : 0.0) + w_syn * (s3 ? 1.0 : 0.0), params_, decay_);
                spk2_.data()[i] = s2;
                spk3_.data()[i] = s3;
                spk4_.data()[i] = s4;
                l3_buffer_.data()[i] = s2;  // becomes layer 3's input next step
            }
        });
        return spk4_;
    }

    /// Encodes the frame difference once, holds the currents constant for
    /// `substeps` timesteps and sums layer-4 spikes per pixel. The
    /// accumulator starts from zero each frame; membrane state carries over.
    SpikeCountField run_frame(const DiffFrame& diff, int substeps, int threads = 1) {
        if (substeps < 1)
            throw std::invalid_argument("Network::run_frame: substeps must be >= 1");
        if (!diff.same_size(v2_))
            throw std::invalid_argument("Network::run_frame: dimension mismatch");
        const CurrentField currents = encode_currents(diff, current_scale_);
        SpikeCountField counts(width_, height_, 0);
        for (int s = 0; s < substeps; ++s) {
            step(currents, threads);
            const std::uint8_t* spikes = spk4_.data().data();
            std::uint32_t* acc = counts.data().data();
            for (std::size_t i = 0; i < counts.size(); ++i)
                acc[i] += spikes[i];
        }
        return counts;
    }

    int width() const { return width_; }
    int height() const { return height_; }
    const NeuronParams& params() const { return params_; }
    const SynapseWeights& weights() const { return weights_; }
    double current_scale() const { return current_scale_; }

    // Last-step spike planes; also what the debug dump writes out.
    const SpikeField& l2_spikes() const { return spk2_; }
    const SpikeField& l3_spikes() const { return spk3_; }
    const SpikeField& l4_spikes() const { return spk4_; }
    const Plane<double>& l2_membrane() const { return v2_; }
    const Plane<double>& l3_membrane() const { return v3_; }
    const Plane<double>& l4_membrane() const { return v4_; }

private:
    int width_;
    int height_;
    NeuronParams params_;
    SynapseWeights weights_;
    double current_scale_;
    double decay_;
    Plane<double> v2_, v3_, v4_;
    Plane<double> ref2_, ref3_, ref4_;
    SpikeField spk2_, spk3_, spk4_;
    SpikeField l3_buffer_;
};

inline Network network_build(int width, int height, const NeuronParams& params,
                             const SynapseWeights& weights, double current_scale = 17.5) {
    if (width <= 0 || height <= 0)
        throw std::invalid_argument("network_build: dimensions must be positive");
    return Network(width, height, params, weights, current_scale);
}

}  // namespace hsmd::snn
