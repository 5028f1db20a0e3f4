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

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "nodulegen/diffusion/denoiser.hpp"
#include "nodulegen/diffusion/schedule.hpp"
#include "nodulegen/metrics/report.hpp"

namespace nodulegen::diffusion {

inline const std::vector<double> kDefaultGuidanceScales{5, 10, 20, 30, 40, 50, 60};

struct SweepOptions {
    std::vector<double> guidance_scales = kDefaultGuidanceScales;
    std::size_t samples = 200;      ///< generated images per guidance scale
    std::size_t references = 500;   ///< real phantoms the metrics compare against
    std::uint64_t seed = 11;
    std::string model_tag = "toy";
    std::size_t kid_subsets = 50;
    /// Consecutive samples share one reference condition and differ only in
    /// seed; diversity is the mean LPIPS over pairs within each such group.
    std::size_t samples_per_condition = 8;
    /// Called after each guidance scale finishes.
    std::function<void(double, const metrics::MetricCell&)> on_scale;
};

struct SweepResult {
    std::vector<metrics::ConfigMetrics> configs;
    metrics::MetricReport report;
};

/// Samples every guidance scale with the same conditions and seeds, then
/// scores each set against fresh reference phantoms: FID and KID on
/// standardized phantom features, paired and diversity LPIPS on perceptual
/// stacks, and condition fidelity as the mean clip_score between each
/// sample's centered features and the centered mean feature of reference
/// phantoms sharing its finding. Throws MetricsError{IncompleteGrid} when
/// `samples` or the scale list is empty.
[[nodiscard]] SweepResult run_gs_sweep(const Denoiser& model, const NoiseSchedule& schedule,
                                       const SweepOptions& options);

}  // namespace nodulegen::diffusion
