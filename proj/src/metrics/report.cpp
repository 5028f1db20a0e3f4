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

#include "nodulegen/metrics/report.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>

namespace nodulegen::metrics {

const char* metric_key(Metric m) noexcept {
    switch (m) {
        case Metric::Fid: return "fid";
        case Metric::Kid: return "kid_mean";
        case Metric::Lpips: return "lpips";
        case Metric::LpipsDiversity: return "lpips_diversity";
        case Metric::ClipScore: return "clipscore";
        case Metric::BioClipScore: return "bioclipscore";
        case Metric::Fidelity: return "fidelity";
    }
    return "?";
}

const char* metric_label(Metric m) noexcept {
    switch (m) {
        case Metric::Fid: return "FID(↓)";
        case Metric::Kid: return "KID(↓)";
        case Metric::Lpips: return "LPIPS(↓)";
        case Metric::LpipsDiversity: return "LPIPS-diversity(↑)";
        case Metric::ClipScore: return "CLIPScore(↑) (w = 2.5)";
        case Metric::BioClipScore: return "BioCLIPScore(↑) (w = 2.5)";
        case Metric::Fidelity: return "Fidelity(↑)";
    }
    return "?";
}

bool lower_is_better(Metric m) noexcept {
    return m == Metric::Fid || m == Metric::Kid || m == Metric::Lpips;
}

std::optional<double> value_of(const MetricCell& c, Metric m) noexcept {
    switch (m) {
        case Metric::Fid: return c.fid;
        case Metric::Kid: return c.kid_mean;
        case Metric::Lpips: return c.lpips;
        case Metric::LpipsDiversity: return c.lpips_diversity;
        case Metric::ClipScore: return c.clipscore;
        case Metric::BioClipScore: return c.bioclipscore;
        case Metric::Fidelity: return c.fidelity;
    }
    return std::nullopt;
}

const MetricCell& MetricReport::cell(const std::string& model, double gs) const {
    auto it = cells.find({model, gs});
    if (it == cells.end()) {
        throw MetricsError(MetricsErrc::IncompleteGrid, model + " GS" + format_gs(gs));
    }
    return it->second;
}

std::string format_gs(double gs) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", gs);
    return buf;
}

MetricReport build_metric_report(const std::vector<ConfigMetrics>& configs, const Baselines& baselines) {
    if (configs.empty()) {
        throw MetricsError(MetricsErrc::IncompleteGrid, "no configurations");
    }
    MetricReport report;
    report.baselines = baselines;
    std::set<double> scales;
    for (const auto& c : configs) {
        if (std::find(report.models.begin(), report.models.end(), c.model) == report.models.end()) {
            report.models.push_back(c.model);
        }
        scales.insert(c.guidance_scale);
        if (!report.cells.emplace(ConfigKey{c.model, c.guidance_scale}, c.values).second) {
            throw MetricsError(MetricsErrc::IncompleteGrid,
                               "duplicate " + c.model + " GS" + format_gs(c.guidance_scale));
        }
    }
    report.guidance_scales.assign(scales.begin(), scales.end());
    for (const auto& model : report.models) {
        for (const double gs : report.guidance_scales) {
            if (report.cells.count({model, gs}) == 0) {
                throw MetricsError(MetricsErrc::IncompleteGrid, "missing " + model + " GS" + format_gs(gs));
            }
        }
    }

    for (const auto metric : kReportMetrics) {
        std::optional<std::pair<double, ConfigKey>> best;
        for (const auto& model : report.models) {
            for (const double gs : report.guidance_scales) {
                const auto v = value_of(report.cells.at({model, gs}), metric);
                if (!v) continue;
                const bool better = !best || (lower_is_better(metric) ? *v < best->first : *v > best->first);
                if (better) best = {{*v, {model, gs}}};
            }
        }
        if (best) report.best[metric] = best->second;
    }
    return report;
}

namespace {

std::string format_value(Metric m, double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, m == Metric::Fid ? "%.2f" : "%.3f", v);
    return buf;
}

nlohmann::json optional_json(const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

std::optional<double> optional_from(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<double>();
}

}  // namespace

std::string render_table(const MetricReport& report) {
    std::ostringstream out;
    out << "Metrics\tModels";
    for (const double gs : report.guidance_scales) out << "\tGS" << format_gs(gs);
    out << '\n';
    for (const auto metric : kReportMetrics) {
        bool any = false;
        for (const auto& [key, cell] : report.cells) any = any || value_of(cell, metric).has_value();
        if (!any) continue;
        bool first_row = true;
        for (const auto& model : report.models) {
            out << (first_row ? metric_label(metric) : "") << '\t' << model;
            first_row = false;
            for (const double gs : report.guidance_scales) {
                const auto v = value_of(report.cells.at({model, gs}), metric);
                out << '\t';
                if (!v) {
                    out << '-';
                    continue;
                }
                out << format_value(metric, *v);
                auto it = report.best.find(metric);
                if (it != report.best.end() && it->second == ConfigKey{model, gs}) out << '*';
            }
            out << '\n';
        }
    }
    if (report.baselines.clipscore || report.baselines.bioclipscore) {
        out << "Real images:";
        if (report.baselines.clipscore) out << " CLIPScore " << format_value(Metric::ClipScore, *report.baselines.clipscore);
        if (report.baselines.bioclipscore) out << " BioCLIPScore " << format_value(Metric::BioClipScore, *report.baselines.bioclipscore);
        out << '\n';
    }
    out << "* best value per metric\n";
    return out.str();
}

nlohmann::json to_json(const MetricCell& c) {
    return {{"fid", optional_json(c.fid)},
            {"kid_mean", optional_json(c.kid_mean)},
            {"kid_std", optional_json(c.kid_std)},
            {"lpips", optional_json(c.lpips)},
            {"lpips_diversity", optional_json(c.lpips_diversity)},
            {"clipscore", optional_json(c.clipscore)},
            {"bioclipscore", optional_json(c.bioclipscore)},
            {"fidelity", optional_json(c.fidelity)}};
}

MetricCell cell_from_json(const nlohmann::json& j) {
    MetricCell c;
    c.fid = optional_from(j, "fid");
    c.kid_mean = optional_from(j, "kid_mean");
    c.kid_std = optional_from(j, "kid_std");
    c.lpips = optional_from(j, "lpips");
    c.lpips_diversity = optional_from(j, "lpips_diversity");
    c.clipscore = optional_from(j, "clipscore");
    c.bioclipscore = optional_from(j, "bioclipscore");
    c.fidelity = optional_from(j, "fidelity");
    return c;
}

nlohmann::json to_json(const MetricReport& report) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& model : report.models) {
        for (const double gs : report.guidance_scales) {
            auto row = to_json(report.cells.at({model, gs}));
            row["model"] = model;
            row["guidance_scale"] = gs;
            rows.push_back(std::move(row));
        }
    }
    nlohmann::json best = nlohmann::json::object();
    for (const auto& [metric, key] : report.best) {
        best[metric_key(metric)] = {{"model", key.first}, {"guidance_scale", key.second}};
    }
    return {{"models", report.models},
            {"guidance_scales", report.guidance_scales},
            {"rows", rows},
            {"best", best},
            {"baselines",
             {{"clipscore", optional_json(report.baselines.clipscore)},
              {"bioclipscore", optional_json(report.baselines.bioclipscore)}}}};
}

}  // namespace nodulegen::metrics
