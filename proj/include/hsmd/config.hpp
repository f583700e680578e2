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

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hsmd/pipeline.hpp"

namespace hsmd::config {

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

inline std::string trim(std::string_view s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string_view::npos)
        return {};
    const auto end = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(begin, end - begin + 1));
}

inline double parse_double(const std::string& key, const std::string& value) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(value, &used);
    } catch (const std::exception&) {
        throw ConfigError(key + ": not a number: '" + value + "'");
    }
    if (used != value.size())
        throw ConfigError(key + ": not a number: '" + value + "'");
    return v;
}

inline long long parse_int(const std::string& key, const std::string& value) {
    long long v = 0;
    const auto* begin = value.data();
    const auto* end = begin + value.size();
    const auto result = std::from_chars(begin, end, v);
    if (result.ec != std::errc{} || result.ptr != end)
        throw ConfigError(key + ": not an integer: '" + value + "'");
    return v;
}

inline std::vector<std::string> split_csv(const std::string& value) {
    std::vector<std::string> parts;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ','))
        if (auto t = trim(item); !t.empty())
            parts.push_back(t);
    return parts;
}

}  // namespace detail

/// Applies one `key = value` setting. Unknown keys are an error so typos in
/// config files surface immediately.
inline void apply_setting(PipelineConfig& cfg, const std::string& key, const std::string& value) {
    using detail::parse_double;
    using detail::parse_int;
    auto int_of = [&](void) { return static_cast<int>(parse_int(key, value)); };

    if (key == "source") cfg.source = value;
    else if (key == "bs.mode") {
        if (value == "frame-diff") cfg.bs.mode = bgs::BsMode::FrameDiff;
        else if (value == "sample-consensus") cfg.bs.mode = bgs::BsMode::SampleConsensus;
        else throw ConfigError("bs.mode: expected frame-diff or sample-consensus, got '" + value + "'");
    }
    else if (key == "bs.diff_threshold") cfg.bs.diff_threshold = int_of();
    else if (key == "bs.samples") cfg.bs.samples = int_of();
    else if (key == "bs.match_threshold") cfg.bs.match_threshold = int_of();
    else if (key == "bs.hamming_threshold") cfg.bs.hamming_threshold = int_of();
    else if (key == "bs.min_matches") cfg.bs.min_matches = int_of();
    else if (key == "bs.replace_prob") cfg.bs.replace_prob = parse_double(key, value);
    else if (key == "bs.neighbor_prob") cfg.bs.neighbor_prob = parse_double(key, value);
    else if (key == "bs.lsbp_margin") cfg.bs.lsbp_margin = int_of();
    else if (key == "bs.init_jitter") cfg.bs.init_jitter = int_of();
    else if (key == "snn.tau_m") cfg.neuron.tau_m_ms = parse_double(key, value);
    else if (key == "snn.resistance") cfg.neuron.resistance = parse_double(key, value);
    else if (key == "snn.e_leak") cfg.neuron.e_leak_mv = parse_double(key, value);
    else if (key == "snn.v_reset") cfg.neuron.v_reset_mv = parse_double(key, value);
    else if (key == "snn.v_min") cfg.neuron.v_min_mv = parse_double(key, value);
    else if (key == "snn.v_threshold") cfg.neuron.v_threshold_mv = parse_double(key, value);
    else if (key == "snn.t_ref") cfg.neuron.t_ref_ms = parse_double(key, value);
    else if (key == "snn.dt") cfg.neuron.dt_ms = parse_double(key, value);
    else if (key == "snn.w_p2i") cfg.weights.pixel_gain = parse_double(key, value);
    else if (key == "snn.w_syn") cfg.weights.spike_weight = parse_double(key, value);
    else if (key == "snn.c") cfg.current_scale = parse_double(key, value);
    else if (key == "snn.substeps") cfg.substeps = int_of();
    else if (key == "filter.mode") {
        if (value == "average") cfg.filter.mode = postfilter::FilterMode::Average;
        else if (value == "median") cfg.filter.mode = postfilter::FilterMode::Median;
        else throw ConfigError("filter.mode: expected average or median, got '" + value + "'");
    }
    else if (key == "filter.width") cfg.filter.kernel.width = int_of();
    else if (key == "filter.height") cfg.filter.kernel.height = int_of();
    else if (key == "filter.threshold") cfg.filter.binarise_threshold = parse_double(key, value);
    else if (key == "threads") cfg.threads = int_of();
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_int(key, value));
    else if (key == "scale") cfg.scale = parse_double(key, value);
    else if (key == "output_dir") cfg.output_dir = value;
    else if (key == "report.formats") cfg.report_formats = detail::split_csv(value);
    else throw ConfigError("unknown config key: '" + key + "'");
}

/// Parses a `key = value` file (# starts a comment). Errors carry the line
/// number.
inline void load_config_file(PipelineConfig& cfg, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file: " + path.string());
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        const std::string trimmed = detail::trim(line);
        if (trimmed.empty())
            continue;
        const auto eq = trimmed.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                              ": expected 'key = value'");
        const std::string key = detail::trim(trimmed.substr(0, eq));
        const std::string value = detail::trim(trimmed.substr(eq + 1));
        try {
            apply_setting(cfg, key, value);
        } catch (const ConfigError& e) {
            throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
}

/// File values first, then command-line overrides, then full validation.
/// Violations are reported together, one per field.
inline PipelineConfig load_config(const std::filesystem::path* file,
                                  const std::vector<std::pair<std::string, std::string>>& overrides) {
    PipelineConfig cfg;
    if (file)
        load_config_file(cfg, *file);
    for (const auto& [key, value] : overrides)
        apply_setting(cfg, key, value);
    const auto errors = cfg.validate();
    if (!errors.empty()) {
        std::string message = "invalid configuration:";
        for (const auto& e : errors)
            message += "\n  - " + e;
        throw ConfigError(message);
    }
    return cfg;
}

}  // namespace hsmd::config
