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

#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "hsmd/cdnet.hpp"
#include "testutil.hpp"

using namespace hsmd;
using namespace hsmd::cdnet;

namespace {

LabelFrame labels_of(int w, int h, std::uint8_t fill) { return LabelFrame(w, h, fill); }

MaskFrame mask_of(int w, int h, std::uint8_t fill) { return MaskFrame(w, h, fill); }

}  // namespace

TEST(FrameConfusion, AllUnknownScoresNothing) {
    const auto c = frame_confusion(mask_of(4, 4, 255), labels_of(4, 4, kLabelUnknown));
    EXPECT_EQ(c, (metrics::Confusion{0, 0, 0, 0}));
}

TEST(FrameConfusion, AllMovingAllPredictedIsAllTp) {
    const auto c = frame_confusion(mask_of(5, 3, 255), labels_of(5, 3, kLabelMoving));
    EXPECT_EQ(c, (metrics::Confusion{15, 0, 0, 0}));
}

TEST(FrameConfusion, ShadowCountsAsBackground) {
    LabelFrame gt(3, 1, 0);
    gt.at(0, 0) = kLabelStatic;
    gt.at(1, 0) = kLabelShadow;
    gt.at(2, 0) = kLabelMoving;
    const auto c = frame_confusion(mask_of(3, 1, 255), gt);
    EXPECT_EQ(c.fp, 2u);  // static and shadow both count as negatives
    EXPECT_EQ(c.tp, 1u);
    EXPECT_EQ(c.tn, 0u);
    EXPECT_EQ(c.fn, 0u);
}

TEST(FrameConfusion, FiveLabelSemantics) {
    LabelFrame gt(5, 1, 0);
    gt.at(0, 0) = kLabelStatic;
    gt.at(1, 0) = kLabelShadow;
    gt.at(2, 0) = kLabelNonRoi;
    gt.at(3, 0) = kLabelUnknown;
    gt.at(4, 0) = kLabelMoving;
    const auto c = frame_confusion(mask_of(5, 1, 255), gt);
    EXPECT_EQ(c, (metrics::Confusion{1, 0, 2, 0}));
}

TEST(FrameConfusion, SpatialRoiExcludesPixels) {
    LabelFrame gt(4, 1, kLabelMoving);
    MaskFrame roi(4, 1, 255);
    roi.at(0, 0) = 0;
    roi.at(1, 0) = 0;
    const auto c = frame_confusion(mask_of(4, 1, 255), gt, &roi);
    EXPECT_EQ(c.tp, 2u);
    EXPECT_EQ(c.total(), 2u);
}

TEST(FrameConfusion, IllegalLabelThrows) {
    LabelFrame gt(2, 2, 99);
    EXPECT_THROW(frame_confusion(mask_of(2, 2, 0), gt), std::invalid_argument);
}

TEST(FrameConfusion, DimensionMismatchThrows) {
    EXPECT_THROW(frame_confusion(mask_of(2, 2, 0), labels_of(3, 2, 0)), std::invalid_argument);
}

TEST(FrameConfusion, MatchesBruteForceOracle) {
    std::mt19937 rng(55);
    const std::uint8_t label_values[5] = {kLabelStatic, kLabelShadow, kLabelNonRoi,
                                          kLabelUnknown, kLabelMoving};
    for (int trial = 0; trial < 100; ++trial) {
        const int w = 1 + static_cast<int>(rng() % 12);
        const int h = 1 + static_cast<int>(rng() % 12);
        LabelFrame gt(w, h);
        MaskFrame pred(w, h);
        MaskFrame roi(w, h);
        for (std::size_t i = 0; i < gt.size(); ++i) {
            gt.data()[i] = label_values[rng() % 5];
            pred.data()[i] = (rng() & 1) ? 255 : 0;
            roi.data()[i] = (rng() % 4 != 0) ? 255 : 0;
        }
        const bool use_roi = rng() & 1;

        metrics::Confusion expected;
        std::uint64_t eligible = 0;
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                if (use_roi && roi.at(x, y) == 0)
                    continue;
                const auto label = gt.at(x, y);
                if (label == kLabelNonRoi || label == kLabelUnknown)
                    continue;
                ++eligible;
                const bool pos = pred.at(x, y) == 255;
                if (label == kLabelMoving)
                    pos ? ++expected.tp : ++expected.fn;
                else
                    pos ? ++expected.fp : ++expected.tn;
            }

        const auto actual = frame_confusion(pred, gt, use_roi ? &roi : nullptr);
        ASSERT_EQ(actual, expected) << "trial " << trial;
        ASSERT_EQ(actual.total(), eligible);
    }
}

TEST(Accumulate, PermutationInvariant) {
    std::mt19937 rng(56);
    std::vector<metrics::Confusion> parts;
    for (int i = 0; i < 12; ++i)
        parts.push_back({rng() % 100, rng() % 100, rng() % 100, rng() % 100});
    const auto base = metrics::accumulate(parts);
    for (int trial = 0; trial < 10; ++trial) {
        std::shuffle(parts.begin(), parts.end(), rng);
        EXPECT_EQ(metrics::accumulate(parts), base);
    }
}

TEST(DiscoverDataset, FindsBaselineHighway) {
    const auto root = testutil::write_mini_dataset("discover", 4, 18);
    std::vector<std::string> warnings;
    const auto entries = discover_dataset(root, &warnings);
    ASSERT_EQ(entries.size(), 1u);
    EXPECT_EQ(entries[0].category, "baseline");
    EXPECT_EQ(entries[0].name, "highway");
    EXPECT_EQ(entries[0].roi_first, 3);
    EXPECT_EQ(entries[0].roi_last, 4);
    EXPECT_TRUE(entries[0].roi_mask_path.has_value());
    EXPECT_TRUE(warnings.empty());
}

TEST(DiscoverDataset, EmptyRootGivesEmptyList) {
    const auto root = testutil::fresh_dir("discover_empty");
    EXPECT_TRUE(discover_dataset(root).empty());
}

TEST(DiscoverDataset, MissingTemporalRoiSkipsWithWarning) {
    const auto root = testutil::write_mini_dataset("discover_noroi", 4, 18);
    std::filesystem::remove(root / "baseline" / "highway" / "temporalROI.txt");
    std::vector<std::string> warnings;
    EXPECT_TRUE(discover_dataset(root, &warnings).empty());
    ASSERT_EQ(warnings.size(), 1u);
    EXPECT_NE(warnings[0].find("temporalROI"), std::string::npos);
}

TEST(DiscoverDataset, MissingGroundtruthSkipsWithWarning) {
    const auto root = testutil::write_mini_dataset("discover_nogt", 4, 18);
    std::filesystem::remove_all(root / "baseline" / "highway" / "groundtruth");
    std::vector<std::string> warnings;
    EXPECT_TRUE(discover_dataset(root, &warnings).empty());
    ASSERT_EQ(warnings.size(), 1u);
    EXPECT_NE(warnings[0].find("groundtruth"), std::string::npos);
}

TEST(DiscoverDataset, NonDirectoryRootThrows) {
    EXPECT_THROW(discover_dataset("/no/such/root"), std::invalid_argument);
}

namespace {

PipelineConfig fast_config() {
    PipelineConfig cfg;
    cfg.bs.mode = bgs::BsMode::FrameDiff;
    return cfg;
}

}  // namespace

TEST(RunVideo, ScoresOnlyInsideTemporalRoi) {
    const auto root = testutil::write_mini_dataset("runvideo", 8, 24);
    const auto entries = discover_dataset(root);
    ASSERT_EQ(entries.size(), 1u);
    const auto result = run_video(entries[0], fast_config());
    EXPECT_EQ(result.frames_total, 8u);
    EXPECT_EQ(result.frames_scored, 6u);  // temporal ROI starts at frame 3
    EXPECT_EQ(result.frame_scores.size(), 6u);
    EXPECT_EQ(result.frame_scores.front().frame_number, 3);

    metrics::Confusion sum;
    for (const auto& f : result.frame_scores)
        sum += f.confusion;
    EXPECT_EQ(sum, result.confusion);
}

TEST(RunVideo, FullTemporalRoiScoresEverything) {
    const auto root = testutil::fresh_dir("runvideo_full");
    synthetic::SequenceConfig cfg;
    cfg.width = cfg.height = 18;
    cfg.frames = 5;
    cfg.square = 6;
    testutil::write_video(root / "cat" / "vid", cfg, 1, 5);
    const auto entries = discover_dataset(root);
    const auto result = run_video(entries[0], fast_config());
    EXPECT_EQ(result.frames_scored, 5u);
}

TEST(RunVideo, DeterministicAcrossRuns) {
    const auto root = testutil::write_mini_dataset("runvideo_det", 6, 24);
    const auto entries = discover_dataset(root);
    PipelineConfig cfg;  // sample-consensus default, seeded
    const auto a = run_video(entries[0], cfg);
    const auto b = run_video(entries[0], cfg);
    EXPECT_EQ(a.confusion, b.confusion);
    ASSERT_EQ(a.frame_scores.size(), b.frame_scores.size());
    for (std::size_t i = 0; i < a.frame_scores.size(); ++i)
        EXPECT_EQ(a.frame_scores[i].confusion, b.frame_scores[i].confusion);
}

TEST(RunVideo, PairsFramesByNumberNotPosition) {
    // Frame numbering starts at 11; scoring must line up by the number in the
    // filename, not by position in the directory listing.
    const auto root = testutil::fresh_dir("runvideo_offset");
    const auto video = root / "cat" / "vid";
    std::filesystem::create_directories(video / "input");
    std::filesystem::create_directories(video / "groundtruth");
    synthetic::SequenceConfig seq;
    seq.width = seq.height = 18;
    seq.frames = 4;
    seq.square = 6;
    for (int i = 0; i < seq.frames; ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "in%06d.jpg", i + 11);
        io::write_jpeg_gray(synthetic::frame_at(seq, i), video / "input" / name);
        std::snprintf(name, sizeof(name), "gt%06d.png", i + 11);
        io::write_gray_png(synthetic::truth_at(seq, i), video / "groundtruth" / name);
    }
    {
        std::ofstream roi(video / "temporalROI.txt");
        roi << 13 << " " << 14 << "\n";
    }
    const auto entries = discover_dataset(root);
    ASSERT_EQ(entries.size(), 1u);
    const auto result = run_video(entries[0], fast_config());
    EXPECT_EQ(result.frames_total, 4u);
    EXPECT_EQ(result.frames_scored, 2u);
    ASSERT_EQ(result.frame_scores.size(), 2u);
    EXPECT_EQ(result.frame_scores[0].frame_number, 13);
    EXPECT_EQ(result.frame_scores[1].frame_number, 14);
}

TEST(RunVideo, MissingScoredGroundTruthAborts) {
    const auto root = testutil::write_mini_dataset("runvideo_missing", 6, 24);
    std::filesystem::remove(root / "baseline" / "highway" / "groundtruth" / "gt000004.png");
    const auto entries = discover_dataset(root);
    ASSERT_EQ(entries.size(), 1u);
    EXPECT_THROW(run_video(entries[0], fast_config()), std::runtime_error);
}

TEST(CategoryResult, PooledEqualsSumOfVideos) {
    const auto root = testutil::fresh_dir("category_two");
    synthetic::SequenceConfig cfg;
    cfg.width = cfg.height = 18;
    cfg.frames = 5;
    cfg.square = 6;
    testutil::write_video(root / "cat" / "vid_a", cfg, 2, 5);
    cfg.texture_seed = 99;
    testutil::write_video(root / "cat" / "vid_b", cfg, 2, 5);

    const auto entries = discover_dataset(root);
    ASSERT_EQ(entries.size(), 2u);
    std::vector<VideoResult> results;
    for (const auto& e : entries)
        results.push_back(run_video(e, fast_config()));
    const auto category = make_category_result("cat", results);
    EXPECT_EQ(category.videos.size(), 2u);
    EXPECT_EQ(category.pooled, results[0].confusion + results[1].confusion);
}

TEST(MeanOfMetricSets, SkipsUndefinedValues) {
    metrics::MetricSet a, b;
    a.recall = 0.4;
    b.recall = 0.8;
    a.precision = 0.5;  // undefined in b
    const auto mean = cdnet::mean_of_metric_sets({a, b});
    EXPECT_DOUBLE_EQ(*mean.recall, 0.6);
    EXPECT_DOUBLE_EQ(*mean.precision, 0.5);
    EXPECT_FALSE(mean.f1.has_value());
}
