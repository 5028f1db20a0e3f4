// Copyright 2026 The nodulegen Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "nodulegen/metrics/embedding.hpp"

namespace nodulegen::metrics {

/// Metric values for one (model, guidance scale) configuration. Absent
/// metrics were not computed for that run.
struct MetricCell {
    std::optional<double> fid;
    std::optional<double> kid_mean;
    std::optional<double> kid_std;
    std::optional<double> lpips;            ///< paired generated-vs-real
    std::optional<double> lpips_diversity;  ///< mean over generated pairs
    std::optional<double> clipscore;
    std::optional<double> bioclipscore;
    std::optional<double> fidelity;         ///< condition fidelity (toy runs)
};

enum class Metric { Fid, Kid, Lpips, LpipsDiversity, ClipScore, BioClipScore, Fidelity };

inline constexpr Metric kReportMetrics[] = {Metric::Fid,           Metric::Kid,
                                            Metric::Lpips,         Metric::LpipsDiversity,
                                            Metric::ClipScore,     Metric::BioClipScore,
                                            Metric::Fidelity};

[[nodiscard]] const char* metric_key(Metric m) noexcept;    ///< JSON key, e.g. "fid"
[[nodiscard]] const char* metric_label(Metric m) noexcept;  ///< table label, e.g. "FID(↓)"
[[nodiscard]] bool lower_is_better(Metric m) noexcept;
[[nodiscard]] std::optional<double> value_of(const MetricCell& cell, Metric m) noexcept;

struct ConfigMetrics {
    std::string model;
    double guidance_scale = 0.0;
    MetricCell values;
};

/// Scores of real images against their own prompts.
struct Baselines {
    std::optional<double> clipscore;
    std::optional<double> bioclipscore;
};

using ConfigKey = std::pair<std::string, double>;

struct MetricReport {
    std::vector<std::string> models;       ///< first-appearance order
    std::vector<double> guidance_scales;   ///< ascending
    std::map<ConfigKey, MetricCell> cells;
    Baselines baselines;
    std::map<Metric, ConfigKey> best;      ///< only metrics with at least one value

    [[nodiscard]] const MetricCell& cell(const std::string& model, double gs) const;
};

/// Assembles a model x GS grid and marks the best configuration per metric
/// (lowest FID/KID/LPIPS, highest of the rest; ties go to the earlier model,
/// then the lower GS). Throws MetricsError{IncompleteGrid} when the grid is
/// empty, has a duplicate, or lacks any model x GS combination.
[[nodiscard]] MetricReport build_metric_report(const std::vector<ConfigMetrics>& configs,
                                               const Baselines& baselines = {});

/// Table layout: one block per metric, one row per model, one column per GS.
/// The best cell carries a trailing '*'.
[[nodiscard]] std::string render_table(const MetricReport& report);

[[nodiscard]] nlohmann::json to_json(const MetricReport& report);
[[nodiscard]] nlohmann::json to_json(const MetricCell& cell);
[[nodiscard]] MetricCell cell_from_json(const nlohmann::json& j);

/// Formats a guidance scale without trailing zeros ("5", "7.5").
[[nodiscard]] std::string format_gs(double gs);

}  // namespace nodulegen::metrics
