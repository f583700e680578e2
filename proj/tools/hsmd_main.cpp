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
#include <cctype>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hsmd/hsmd.hpp"

#ifdef HSMD_WITH_CAPTURE
#include <opencv2/videoio.hpp>
#endif

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Digit runs compare numerically so in2.jpg sorts before in10.jpg.
bool natural_less(const std::string& a, const std::string& b) {
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        const bool da = std::isdigit(static_cast<unsigned char>(a[i]));
        const bool db = std::isdigit(static_cast<unsigned char>(b[j]));
        if (da && db) {
            std::size_t ia = i, jb = j;
            while (ia < a.size() && std::isdigit(static_cast<unsigned char>(a[ia]))) ++ia;
            while (jb < b.size() && std::isdigit(static_cast<unsigned char>(b[jb]))) ++jb;
            const std::string na = a.substr(i, ia - i);
            const std::string nb = b.substr(j, jb - j);
            const std::string ta = na.substr(na.find_first_not_of('0') == std::string::npos
                                                 ? na.size() - 1
                                                 : na.find_first_not_of('0'));
            const std::string tb = nb.substr(nb.find_first_not_of('0') == std::string::npos
                                                 ? nb.size() - 1
                                                 : nb.find_first_not_of('0'));
            if (ta.size() != tb.size())
                return ta.size() < tb.size();
            if (ta != tb)
                return ta < tb;
            i = ia;
            j = jb;
        } else {
            if (a[i] != b[j])
                return a[i] < b[j];
            ++i;
            ++j;
        }
    }
    return a.size() < b.size();
}

bool has_image_extension(const fs::path& p) {
    std::string e = p.extension().string();
    for (char& c : e)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return e == ".jpg" || e == ".jpeg" || e == ".png" || e == ".bmp";
}

std::vector<fs::path> list_sequence(const fs::path& dir) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && has_image_extension(entry.path()))
            files.push_back(entry.path());
    std::sort(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) {
        return natural_less(a.filename().string(), b.filename().string());
    });
    return files;
}

struct CommonFlags {
    std::string config_file;
    std::vector<std::string> sets;
    std::optional<std::string> bs_mode;
    std::optional<int> threads;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_file, "Configuration file (key = value lines)");
    cmd->add_option("--set", flags.sets, "Override any config key, e.g. --set snn.c=17.5")
        ->type_name("KEY=VALUE");
    cmd->add_option("--bs", flags.bs_mode, "Background subtraction mode")
        ->check(CLI::IsMember({"frame-diff", "sample-consensus"}));
    cmd->add_option("--threads", flags.threads, "Worker threads for per-pixel stages");
    cmd->add_option("--seed", flags.seed, "Random seed for the background model");
    cmd->add_option("--out", flags.out_dir, "Output directory");
}

hsmd::PipelineConfig build_config(const CommonFlags& flags) {
    std::vector<std::pair<std::string, std::string>> overrides;
    if (flags.bs_mode)
        overrides.emplace_back("bs.mode", *flags.bs_mode);
    if (flags.threads)
        overrides.emplace_back("threads", std::to_string(*flags.threads));
    if (flags.seed)
        overrides.emplace_back("seed", std::to_string(*flags.seed));
    if (!flags.out_dir.empty())
        overrides.emplace_back("output_dir", flags.out_dir);
    for (const auto& kv : flags.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw hsmd::config::ConfigError("--set expects KEY=VALUE, got '" + kv + "'");
        overrides.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
    }
    const fs::path file = flags.config_file;
    return hsmd::config::load_config(flags.config_file.empty() ? nullptr : &file, overrides);
}

void dump_spike_layers(const hsmd::snn::Network& net, const fs::path& dir, std::size_t frame_no) {
    fs::create_directories(dir);
    auto save = [&](const hsmd::snn::SpikeField& plane, const char* layer) {
        hsmd::GrayFrame img(plane.width(), plane.height());
        for (std::size_t i = 0; i < plane.size(); ++i)
            img.data()[i] = plane.data()[i] ? 255 : 0;
        char name[64];
        std::snprintf(name, sizeof(name), "%s_%06zu.png", layer, frame_no);
        hsmd::io::write_gray_png(img, dir / name);
    };
    save(net.l2_spikes(), "l2");
    save(net.l3_spikes(), "l3");
    save(net.l4_spikes(), "l4");
}

json run_report_json(const hsmd::RunReport& report) {
    return json{{"frames", report.frames},
                {"mean_ms_per_frame", report.mean_ms},
                {"median_ms_per_frame", report.median_ms},
                {"p95_ms_per_frame", report.p95_ms},
                {"fps", report.fps},
                {"mean_stage_ms",
                 {{"background_subtraction", report.mean_stage_ms.bs_ms},
                  {"snn", report.mean_stage_ms.snn_ms},
                  {"postfilter", report.mean_stage_ms.filter_ms}}},
                {"mean_l4_spikes_per_frame", report.mean_l4_spikes}};
}

void print_report(const hsmd::RunReport& report) {
    std::cout << "frames processed : " << report.frames << "\n"
              << "mean ms/frame    : " << report.mean_ms << "\n"
              << "median ms/frame  : " << report.median_ms << "\n"
              << "p95 ms/frame     : " << report.p95_ms << "\n"
              << "fps              : " << report.fps << "\n"
              << "stage ms (bs/snn/filter): " << report.mean_stage_ms.bs_ms << " / "
              << report.mean_stage_ms.snn_ms << " / " << report.mean_stage_ms.filter_ms << "\n"
              << "mean L4 spikes/frame    : " << report.mean_l4_spikes << "\n";
}

int cmd_run(const CommonFlags& flags, const std::string& source, bool dump_masks,
            bool debug_layers, bool progress) {
    hsmd::PipelineConfig cfg = build_config(flags);
    if (!source.empty())
        cfg.source = source;
    if (cfg.source.empty())
        throw std::runtime_error("run: --source is required");

    hsmd::Pipeline pipeline(cfg);
    std::vector<hsmd::StageTimings> timings;
    double spike_sum = 0.0;
    std::size_t frame_no = 0;
    const fs::path out_dir = cfg.output_dir;
    if (dump_masks || debug_layers)
        fs::create_directories(out_dir);

    auto handle_frame = [&](const hsmd::GrayFrame& gray) {
        hsmd::StageTimings t;
        const hsmd::MaskFrame mask = pipeline.process(gray, &t);
        timings.push_back(t);
        spike_sum += static_cast<double>(pipeline.last_spike_total());
        if (dump_masks) {
            char name[32];
            std::snprintf(name, sizeof(name), "mask_%06zu.png", frame_no);
            hsmd::io::write_mask(mask, out_dir / name);
        }
        if (debug_layers && pipeline.network())
            dump_spike_layers(*pipeline.network(), out_dir / "debug", frame_no);
        if (progress)
            std::cerr << "\rframe " << frame_no << std::flush;
        ++frame_no;
    };

    const fs::path source_path = cfg.source;
    const bool is_device = cfg.source.rfind("device:", 0) == 0 ||
                           (!cfg.source.empty() &&
                            std::all_of(cfg.source.begin(), cfg.source.end(), [](char c) {
                                return std::isdigit(static_cast<unsigned char>(c));
                            }));
    if (is_device || (fs::is_regular_file(source_path) && !has_image_extension(source_path))) {
#ifdef HSMD_WITH_CAPTURE
        cv::VideoCapture capture;
        if (is_device) {
            const std::string digits =
                cfg.source.rfind("device:", 0) == 0 ? cfg.source.substr(7) : cfg.source;
            capture.open(std::stoi(digits));
        } else {
            capture.open(cfg.source);
        }
        if (!capture.isOpened())
            throw std::runtime_error("cannot open capture source: " + cfg.source);
        cv::Mat bgr;
        while (capture.read(bgr)) {
            hsmd::RgbFrame frame(bgr.cols, bgr.rows);
            for (int y = 0; y < bgr.rows; ++y)
                for (int x = 0; x < bgr.cols; ++x) {
                    const auto& px = bgr.at<cv::Vec3b>(y, x);
                    auto* dst = frame.pixel(x, y);
                    dst[0] = px[2];
                    dst[1] = px[1];
                    dst[2] = px[0];
                }
            handle_frame(hsmd::to_grayscale(frame));
        }
#else
        throw std::runtime_error(
            "camera/video sources need a build with -DHSMD_WITH_CAPTURE=ON; "
            "image sequences and datasets work without it");
#endif
    } else if (fs::is_directory(source_path)) {
        const auto files = list_sequence(source_path);
        if (files.empty())
            throw std::runtime_error("no image files under: " + cfg.source);
        for (const auto& file : files)
            handle_frame(hsmd::io::load_gray(file));
    } else if (fs::is_regular_file(source_path)) {
        handle_frame(hsmd::io::load_gray(source_path));
    } else {
        throw std::runtime_error("unreachable source: " + cfg.source);
    }

    if (progress)
        std::cerr << "\n";
    hsmd::RunReport report = hsmd::summarize_run(timings);
    report.mean_l4_spikes = report.frames ? spike_sum / static_cast<double>(report.frames) : 0.0;
    print_report(report);
    fs::create_directories(out_dir);
    std::ofstream json_out(out_dir / "run_report.json");
    json_out << run_report_json(report).dump(2) << "\n";
    return 0;
}

int cmd_bench(const CommonFlags& flags, const std::string& dataset,
              const std::string& categories, const std::string& formats) {
    hsmd::PipelineConfig cfg = build_config(flags);
    if (!formats.empty())
        hsmd::config::apply_setting(cfg, "report.formats", formats);
    if (cfg.scale != 1.0)
        throw hsmd::config::ConfigError(
            "scale: must be 1 in bench mode (masks must match ground-truth dimensions)");

    std::vector<std::string> category_filter;
    if (!categories.empty()) {
        std::stringstream ss(categories);
        std::string item;
        while (std::getline(ss, item, ','))
            if (!item.empty())
                category_filter.push_back(item);
    }

    std::vector<std::string> warnings;
    const auto result = hsmd::report::run_benchmark(cfg, dataset, category_filter, &warnings);
    for (const auto& w : warnings)
        std::cerr << "warning: " << w << "\n";

    const fs::path out_dir = cfg.output_dir;
    hsmd::report::write_bench_reports(result, out_dir, cfg.report_formats, dataset);
    std::cout << "videos scored   : " << result.videos.size() << "\n"
              << "categories      : " << result.categories.size() << "\n"
              << "reports written : " << out_dir.string() << "\n";
    if (!result.failures.empty()) {
        std::cerr << result.failures.size() << " video(s) failed:\n";
        for (const auto& f : result.failures)
            std::cerr << "  " << f.category << "/" << f.video << ": " << f.error << "\n";
        return 1;
    }
    return 0;
}

int cmd_rank(const std::string& fixtures, const std::string& out_dir,
             const std::string& formats) {
    const auto table = hsmd::report::load_fixtures(fixtures);
    const bool csv = formats.find("csv") != std::string::npos;
    const bool js = formats.find("json") != std::string::npos;
    fs::create_directories(out_dir);

    json out_json;
    std::string rc_csv;
    if (table.categories.empty()) {
        const auto ranked = hsmd::metrics::rank_methods(table.methods, table.rows);
        if (csv)
            hsmd::report::write_text(fs::path(out_dir) / "rank.csv",
                                             hsmd::report::rank_csv(ranked));
        out_json["overall"] = hsmd::report::rank_json(ranked);
        std::cout << hsmd::report::rank_csv(ranked);
    } else {
        // Group rows per category, rank each, then average across categories.
        std::vector<std::string> category_names;
        std::vector<hsmd::metrics::RankTable> tables;
        for (std::size_t i = 0; i < table.categories.size(); ++i) {
            if (std::find(category_names.begin(), category_names.end(), table.categories[i]) ==
                category_names.end())
                category_names.push_back(table.categories[i]);
        }
        std::string per_category_csv;
        for (const auto& cat : category_names) {
            std::vector<std::string> methods;
            std::vector<hsmd::metrics::MetricSet> rows;
            for (std::size_t i = 0; i < table.categories.size(); ++i)
                if (table.categories[i] == cat) {
                    methods.push_back(table.methods[i]);
                    rows.push_back(table.rows[i]);
                }
            tables.push_back(hsmd::metrics::rank_methods(methods, rows));
            out_json["categories"].push_back(
                {{"category", cat}, {"table", hsmd::report::rank_json(tables.back())}});
            per_category_csv += "# category: " + cat + "\n" + hsmd::report::rank_csv(tables.back());
        }
        const auto rc = hsmd::metrics::rank_across_categories(tables);
        rc_csv = "method,RC\n";
        for (std::size_t i = 0; i < rc.methods.size(); ++i) {
            rc_csv += rc.methods[i] + "," + std::to_string(rc.rc[i]) + "\n";
            out_json["rc"].push_back({{"method", rc.methods[i]}, {"RC", rc.rc[i]}});
        }
        if (csv) {
            hsmd::report::write_text(fs::path(out_dir) / "rank.csv", per_category_csv);
            hsmd::report::write_text(fs::path(out_dir) / "rc.csv", rc_csv);
        }
        std::cout << rc_csv;
    }
    if (js)
        hsmd::report::write_text(fs::path(out_dir) / "rank.json",
                                         out_json.dump(2) + "\n");
    return 0;
}

int cmd_synth(const std::string& out_dir, int width, int height, int frames) {
    hsmd::synthetic::SequenceConfig cfg;
    cfg.width = width;
    cfg.height = height;
    cfg.frames = frames;
    fs::create_directories(out_dir);
    for (int i = 0; i < cfg.frames; ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "in%06d.jpg", i + 1);
        hsmd::io::write_jpeg_gray(hsmd::synthetic::frame_at(cfg, i), fs::path(out_dir) / name);
    }
    std::cout << "wrote " << cfg.frames << " frames to " << out_dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"HSMD motion detection: background subtraction fused with a "
                 "3-layer spiking network"};
    app.require_subcommand(1);

    CommonFlags run_flags;
    std::string run_source;
    std::optional<double> run_scale;
    bool dump_masks = false, debug_layers = false, progress = false;
    auto* run = app.add_subcommand("run", "Process a frame source and emit motion masks");
    run->add_option("--source", run_source, "Image-sequence dir, image/video file or device:N");
    add_common_flags(run, run_flags);
    run->add_option("--scale", run_scale, "Rescale input frames (throughput experiments)");
    run->add_flag("--dump-masks", dump_masks, "Write one mask PNG per frame");
    run->add_flag("--debug-layers", debug_layers, "Dump per-layer spike planes as PNGs");
    run->add_flag("--progress", progress, "Print a progress line to stderr");

    CommonFlags bench_flags;
    std::string dataset, categories, bench_formats;
    auto* bench = app.add_subcommand("bench", "Score a CDnet-layout dataset");
    bench->add_option("--dataset", dataset, "Dataset root (category/video layout)")->required();
    bench->add_option("--categories", categories, "Comma-separated category filter");
    bench->add_option("--format", bench_formats, "Report formats, e.g. csv,json");
    add_common_flags(bench, bench_flags);

    std::string fixtures, rank_out = "hsmd_out", rank_formats = "csv,json";
    auto* rank = app.add_subcommand("rank", "Rank externally supplied metric tables");
    rank->add_option("--fixtures", fixtures, "CSV: [category,]method,Re,...,F1")->required();
    rank->add_option("--out", rank_out, "Output directory");
    rank->add_option("--format", rank_formats, "Report formats, e.g. csv,json");

    std::string synth_out = "synthetic";
    int synth_w = 64, synth_h = 64, synth_frames = 60;
    auto* synth = app.add_subcommand("synth", "Generate the synthetic moving-square sequence");
    synth->add_option("--out", synth_out, "Output directory");
    synth->add_option("--width", synth_w, "Frame width");
    synth->add_option("--height", synth_h, "Frame height");
    synth->add_option("--frames", synth_frames, "Frame count");

    CLI11_PARSE(app, argc, argv);

    if (run_scale)
        run_flags.sets.push_back("scale=" + std::to_string(*run_scale));

    try {
        if (run->parsed())
            return cmd_run(run_flags, run_source, dump_masks, debug_layers, progress);
        if (bench->parsed())
            return cmd_bench(bench_flags, dataset, categories, bench_formats);
        if (rank->parsed())
            return cmd_rank(fixtures, rank_out, rank_formats);
        if (synth->parsed())
            return cmd_synth(synth_out, synth_w, synth_h, synth_frames);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
