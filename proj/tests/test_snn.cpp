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

#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "hsmd/snn.hpp"

using namespace hsmd;
using namespace hsmd::snn;

namespace {

NeuronParams default_params() { return NeuronParams{}; }

// First 1-based step at which a neuron under constant current fires.
int first_spike_step(double current, const NeuronParams& p, int max_steps = 100) {
    NeuronState state{p.e_leak_mv};
    for (int step = 1; step <= max_steps; ++step)
        if (lif_step(state, current, p))
            return step;
    return -1;
}

}  // namespace

TEST(EncodeCurrents, ZeroStaysZero) {
    DiffFrame diff(3, 3, 0);
    const auto currents = encode_currents(diff, 17.5);
    for (auto v : currents.data())
        EXPECT_EQ(v, 0.0f);
}

TEST(EncodeCurrents, FullScaleTimesDefaultConstant) {
    DiffFrame diff(1, 1, 255);
    EXPECT_FLOAT_EQ(encode_currents(diff, 17.5).at(0, 0), 4462.5f);
}

TEST(EncodeCurrents, ProportionalToIntensity) {
    DiffFrame diff(1, 1, 100);
    EXPECT_FLOAT_EQ(encode_currents(diff, 17.5).at(0, 0), 1750.0f);
}

TEST(LifStep, EquilibriumWithoutInput) {
    const auto p = default_params();
    NeuronState state{p.e_leak_mv};
    for (int i = 0; i < 10; ++i) {
        EXPECT_FALSE(lif_step(state, 0.0, p));
        EXPECT_DOUBLE_EQ(state.v_m, p.e_leak_mv);
    }
}

TEST(LifStep, ConstantCurrentCrossesOnFirstStep) {
    // tau * ln(30 / 15) ~= 6.93 ms lies inside the first 10 ms step.
    const auto p = default_params();
    EXPECT_EQ(first_spike_step(30.0, p), 1);
}

TEST(LifStep, SubThresholdConvergesWithoutSpiking) {
    const auto p = default_params();
    NeuronState state{p.e_leak_mv};
    for (int i = 0; i < 1000; ++i)
        EXPECT_FALSE(lif_step(state, 10.0, p));
    EXPECT_NEAR(state.v_m, -60.0, 1e-9);
}

TEST(LifStep, MatchesClosedFormBelowThreshold) {
    const auto p = default_params();
    const double current = 10.0;
    const double v_inf = p.e_leak_mv + p.resistance * current;
    const double alpha = std::exp(-p.dt_ms / p.tau_m_ms);
    NeuronState state{p.e_leak_mv};
    for (int step = 1; step <= 1000; ++step) {
        lif_step(state, current, p);
        const double expected = v_inf + (p.e_leak_mv - v_inf) * std::pow(alpha, step);
        EXPECT_NEAR(state.v_m, expected, std::abs(expected) * 1e-9) << "step " << step;
    }
}

TEST(LifStep, NonFiniteCurrentThrows) {
    const auto p = default_params();
    NeuronState state{p.e_leak_mv};
    EXPECT_THROW(lif_step(state, std::numeric_limits<double>::quiet_NaN(), p),
                 std::invalid_argument);
    EXPECT_THROW(lif_step(state, std::numeric_limits<double>::infinity(), p),
                 std::invalid_argument);
}

TEST(LifStep, ClampsAtFloor) {
    auto p = default_params();
    p.v_min_mv = -80.0;
    p.v_reset_mv = -75.0;
    NeuronState state{p.e_leak_mv};
    lif_step(state, -10000.0, p);
    EXPECT_DOUBLE_EQ(state.v_m, p.v_min_mv);
}

TEST(LifStep, RefractoryShorterThanStepNeverSuppresses) {
    const auto p = default_params();  // t_ref 2 ms < dt 10 ms
    NeuronState state{p.e_leak_mv};
    int spikes = 0;
    for (int i = 0; i < 5; ++i)
        spikes += lif_step(state, 4462.5 * 8.0, p);
    EXPECT_EQ(spikes, 5);
}

TEST(LifStep, LongRefractorySwallowsWholeSteps) {
    auto p = default_params();
    p.t_ref_ms = 25.0;  // blocks the two following 10 ms steps
    NeuronState state{p.e_leak_mv};
    std::vector<int> spike_steps;
    for (int step = 1; step <= 10; ++step)
        if (lif_step(state, 1000.0, p))
            spike_steps.push_back(step);
    ASSERT_GE(spike_steps.size(), 3u);
    EXPECT_EQ(spike_steps[0], 1);
    EXPECT_EQ(spike_steps[1], 4);
    EXPECT_EQ(spike_steps[2], 7);
}

TEST(LifStep, SubThresholdSteadyStateIsLinearInCurrent) {
    auto p = default_params();
    p.v_threshold_mv = std::numeric_limits<double>::infinity();
    p.resistance = 2.5;
    for (double current : {1.0, 3.0, 7.0, 20.0, 100.0}) {
        NeuronState state{p.e_leak_mv};
        for (int i = 0; i < 2000; ++i)
            lif_step(state, current, p);
        EXPECT_NEAR((state.v_m - p.e_leak_mv) / current, p.resistance, 1e-9);
    }
}

TEST(LifStep, SpikeCountMonotoneInCurrent) {
    const auto p = default_params();
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> amp(0.0, 40.0);
    for (int trial = 0; trial < 50; ++trial) {
        double lo = amp(rng), hi = amp(rng);
        if (lo > hi)
            std::swap(lo, hi);
        int count_lo = 0, count_hi = 0;
        NeuronState a{p.e_leak_mv}, b{p.e_leak_mv};
        for (int i = 0; i < 50; ++i) {
            count_lo += lif_step(a, lo, p);
            count_hi += lif_step(b, hi, p);
        }
        EXPECT_LE(count_lo, count_hi) << lo << " vs " << hi;
    }
}

TEST(NetworkBuild, ThreePlanesOfWidthTimesHeight) {
    const auto net = network_build(4, 3, default_params(), SynapseWeights{});
    EXPECT_EQ(net.l2_membrane().size(), 12u);
    EXPECT_EQ(net.l3_membrane().size(), 12u);
    EXPECT_EQ(net.l4_membrane().size(), 12u);
}

TEST(NetworkBuild, InitialMembraneIsLeakReversal) {
    const auto p = default_params();
    const auto net = network_build(5, 5, p, SynapseWeights{});
    for (auto v : net.l2_membrane().data())
        EXPECT_DOUBLE_EQ(v, p.e_leak_mv);
    for (auto v : net.l4_membrane().data())
        EXPECT_DOUBLE_EQ(v, p.e_leak_mv);
}

TEST(NetworkBuild, RebuildIsStructurallyIdentical) {
    const auto a = network_build(6, 2, default_params(), SynapseWeights{});
    const auto b = network_build(6, 2, default_params(), SynapseWeights{});
    EXPECT_EQ(a.l2_membrane(), b.l2_membrane());
    EXPECT_EQ(a.l3_spikes(), b.l3_spikes());
}

TEST(NetworkBuild, RejectsEmptyDimensions) {
    EXPECT_THROW(network_build(0, 3, default_params(), SynapseWeights{}), std::invalid_argument);
}

TEST(NetworkStep, NoInputNoSpikes) {
    auto net = network_build(4, 4, default_params(), SynapseWeights{});
    CurrentField zero(4, 4, 0.0f);
    for (int i = 0; i < 5; ++i) {
        const auto spikes = net.step(zero);
        for (auto s : spikes.data())
            EXPECT_EQ(s, 0);
    }
}

TEST(NetworkStep, ChainTimingThroughLayers) {
    // Saturating drive on one pixel: layer 2 fires immediately, layer 4 fires
    // the same step through the direct path, layer 3 one step later.
    auto net = network_build(4, 3, default_params(), SynapseWeights{});
    CurrentField drive(4, 3, 0.0f);
    drive.at(1, 1) = 4462.5f;

    net.step(drive);  // timestep 1
    EXPECT_EQ(net.l2_spikes().at(1, 1), 1);
    EXPECT_EQ(net.l3_spikes().at(1, 1), 0);
    EXPECT_EQ(net.l4_spikes().at(1, 1), 1);

    net.step(drive);  // timestep 2
    EXPECT_EQ(net.l2_spikes().at(1, 1), 1);
    EXPECT_EQ(net.l3_spikes().at(1, 1), 1);
    EXPECT_EQ(net.l4_spikes().at(1, 1), 1);
}

TEST(NetworkStep, DelayLawForAnyStimulusOnset) {
    for (int onset = 1; onset <= 5; ++onset) {
        auto net = network_build(1, 1, default_params(), SynapseWeights{});
        CurrentField off(1, 1, 0.0f);
        CurrentField on(1, 1, 4462.5f);
        int first_l2 = -1, first_l3 = -1, first_l4 = -1;
        for (int step = 1; step <= 10; ++step) {
            net.step(step >= onset ? on : off);
            if (first_l2 < 0 && net.l2_spikes().at(0, 0))
                first_l2 = step;
            if (first_l3 < 0 && net.l3_spikes().at(0, 0))
                first_l3 = step;
            if (first_l4 < 0 && net.l4_spikes().at(0, 0))
                first_l4 = step;
        }
        EXPECT_EQ(first_l2, onset);
        EXPECT_EQ(first_l3, onset + 1);
        EXPECT_EQ(first_l4, onset);
    }
}

TEST(NetworkStep, PerturbationStaysLocal) {
    const auto p = default_params();
    auto baseline = network_build(8, 6, p, SynapseWeights{});
    auto perturbed = network_build(8, 6, p, SynapseWeights{});
    DiffFrame quiet(8, 6, 0);
    DiffFrame poke(8, 6, 0);
    poke.at(3, 2) = 200;

    const auto counts_base = baseline.run_frame(quiet, 4);
    const auto counts_poke = perturbed.run_frame(poke, 4);
    for (int y = 0; y < 6; ++y)
        for (int x = 0; x < 8; ++x) {
            if (x == 3 && y == 2)
                continue;
            EXPECT_EQ(counts_base.at(x, y), counts_poke.at(x, y));
            EXPECT_DOUBLE_EQ(baseline.l2_membrane().at(x, y), perturbed.l2_membrane().at(x, y));
            EXPECT_DOUBLE_EQ(baseline.l4_membrane().at(x, y), perturbed.l4_membrane().at(x, y));
        }
    EXPECT_GT(counts_poke.at(3, 2), 0u);
}

TEST(NetworkStep, IdenticalRunsAreIdentical) {
    std::mt19937 rng(71);
    DiffFrame diff(9, 7);
    for (auto& v : diff.data())
        v = static_cast<std::uint8_t>(rng() % 256);
    auto a = network_build(9, 7, default_params(), SynapseWeights{});
    auto b = network_build(9, 7, default_params(), SynapseWeights{});
    for (int i = 0; i < 5; ++i)
        ASSERT_EQ(a.run_frame(diff, 2), b.run_frame(diff, 2));
}

TEST(NetworkStep, BitIdenticalAcrossThreadCounts) {
    std::mt19937 rng(72);
    std::vector<DiffFrame> frames;
    for (int i = 0; i < 4; ++i) {
        DiffFrame diff(16, 12);
        for (auto& v : diff.data())
            v = static_cast<std::uint8_t>(rng() % 256);
        frames.push_back(diff);
    }
    auto one = network_build(16, 12, default_params(), SynapseWeights{});
    auto many = network_build(16, 12, default_params(), SynapseWeights{});
    for (const auto& diff : frames) {
        ASSERT_EQ(one.run_frame(diff, 3, 1), many.run_frame(diff, 3, 8));
        ASSERT_EQ(one.l2_membrane(), many.l2_membrane());
        ASSERT_EQ(one.l3_membrane(), many.l3_membrane());
        ASSERT_EQ(one.l4_membrane(), many.l4_membrane());
    }
}

TEST(RunFrame, ZeroDiffGivesZeroCounts) {
    auto net = network_build(5, 5, default_params(), SynapseWeights{});
    const auto counts = net.run_frame(DiffFrame(5, 5, 0), 3);
    for (auto c : counts.data())
        EXPECT_EQ(c, 0u);
}

TEST(RunFrame, SingleSubstepCountsAreBinary) {
    std::mt19937 rng(73);
    DiffFrame diff(10, 10);
    for (auto& v : diff.data())
        v = static_cast<std::uint8_t>(rng() % 256);
    auto net = network_build(10, 10, default_params(), SynapseWeights{});
    const auto counts = net.run_frame(diff, 1);
    for (auto c : counts.data())
        EXPECT_LE(c, 1u);
}

TEST(RunFrame, SaturatingPixelCountsEverySubstep) {
    auto net = network_build(3, 3, default_params(), SynapseWeights{});
    DiffFrame diff(3, 3, 0);
    diff.at(1, 1) = 255;
    const auto counts = net.run_frame(diff, 5);
    EXPECT_EQ(counts.at(1, 1), 5u);
}

TEST(RunFrame, CountsNeverExceedSubsteps) {
    std::mt19937 rng(74);
    DiffFrame diff(6, 6);
    for (auto& v : diff.data())
        v = static_cast<std::uint8_t>(rng() % 256);
    auto net = network_build(6, 6, default_params(), SynapseWeights{});
    const auto counts = net.run_frame(diff, 7);
    for (auto c : counts.data())
        EXPECT_LE(c, 7u);
}

TEST(RunFrame, RejectsBadArguments) {
    auto net = network_build(4, 4, default_params(), SynapseWeights{});
    EXPECT_THROW(net.run_frame(DiffFrame(4, 4, 0), 0), std::invalid_argument);
    EXPECT_THROW(net.run_frame(DiffFrame(5, 4, 0), 1), std::invalid_argument);
}

TEST(NeuronParams, ValidateCatchesInconsistentThresholds) {
    NeuronParams p;
    p.v_threshold_mv = p.v_reset_mv;  // threshold must sit above reset
    const auto errors = p.validate();
    ASSERT_EQ(errors.size(), 1u);
    EXPECT_NE(errors[0].find("v_threshold"), std::string::npos);
}
