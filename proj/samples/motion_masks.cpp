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

// Minimal library walkthrough: generate a moving-square sequence in memory,
// push it through the pipeline and write the binary motion masks.

#include <cstdio>
#include <filesystem>
#include <iostream>

#include "hsmd/hsmd.hpp"

int main(int argc, char** argv) {
    const std::filesystem::path out_dir = argc > 1 ? argv[1] : "sample_masks";
    std::filesystem::create_directories(out_dir);

    hsmd::synthetic::SequenceConfig sequence;
    hsmd::PipelineConfig cfg;
    cfg.bs.mode = hsmd::bgs::BsMode::FrameDiff;

    hsmd::Pipeline pipeline(cfg);
    for (int i = 0; i < sequence.frames; ++i) {
        const hsmd::GrayFrame frame = hsmd::synthetic::frame_at(sequence, i);
        const hsmd::MaskFrame mask = pipeline.process(frame);
        char name[32];
        std::snprintf(name, sizeof(name), "mask_%06d.png", i);
        hsmd::io::write_mask(mask, out_dir / name);
    }
    std::cout << "wrote " << sequence.frames << " masks to " << out_dir << "\n";
    return 0;
}
