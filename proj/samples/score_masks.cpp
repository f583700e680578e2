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

// Scores the pipeline against the synthetic sequence's constructed ground
// truth and prints the eight metrics.

#include <iostream>

#include "hsmd/hsmd.hpp"

int main() {
    hsmd::synthetic::SequenceConfig sequence;
    hsmd::PipelineConfig cfg;
    cfg.bs.mode = hsmd::bgs::BsMode::FrameDiff;

    hsmd::Pipeline pipeline(cfg);
    hsmd::metrics::Confusion total;
    for (int i = 0; i < sequence.frames; ++i) {
        const hsmd::MaskFrame mask = pipeline.process(hsmd::synthetic::frame_at(sequence, i));
        if (i < hsmd::synthetic::kFirstScoredFrame)
            continue;
        const hsmd::MaskFrame truth = hsmd::synthetic::truth_at(sequence, i);
        const hsmd::LabelFrame labels =
            hsmd::LabelFrame::from_data(truth.width(), truth.height(), truth.data());
        total += hsmd::cdnet::frame_confusion(mask, labels);
    }

    const auto m = hsmd::metrics::compute_metrics(total);
    for (hsmd::metrics::Metric metric : hsmd::metrics::kAllMetrics) {
        const auto v = m.get(metric);
        std::cout << hsmd::metrics::metric_name(metric) << " = ";
        if (v)
            std::cout << *v << "\n";
        else
            std::cout << "undefined\n";
    }
    return 0;
}
