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

#include "nodulegen/diffusion/sweep.hpp"

#include <cmath>
#include <map>

#include "nodulegen/common/random.hpp"
#include "nodulegen/diffusion/features.hpp"
#include "nodulegen/diffusion/phantom.hpp"
#include "nodulegen/diffusion/sampler.hpp"
#include "nodulegen/metrics/clip_score.hpp"
#include "nodulegen/metrics/frechet.hpp"
#include "nodulegen/metrics/kid.hpp"
#include "nodulegen/metrics/lpips.hpp"

namespace nodulegen::diffusion {

namespace {

bool is_zero(std::span<const float> v) {
    for (const float x : v)
        if (x != 0.0f) return false;
    return true;
}

}  // namespace

SweepResult run_gs_sweep(const Denoiser& model, const NoiseSchedule& schedule, const SweepOptions& options) {
    if (options.samples == 0 || options.guidance_scales.empty()) {
        throw metrics::MetricsError(metrics::MetricsErrc::IncompleteGrid, "sweep has no samples or no scales");
    }
    if (options.samples_per_condition == 0) {
        throw metrics::MetricsError(metrics::MetricsErrc::InvalidArgument, "samples_per_condition must be positive");
    }
    if (options.references < 2) {
        throw metrics::MetricsError(metrics::MetricsErrc::TooFewRows, "sweep needs at least 2 reference phantoms");
    }
    const auto side = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(model.config().pixels))));

    const auto references = phantom_corpus(options.references, derive_seed(options.seed, 1), side);
    std::vector<Grid<float>> ref_images;
    std::vector<metrics::ActivationStack> ref_stacks;
    for (const auto& p : references) {
        ref_images.push_back(p.image);
        ref_stacks.push_back(perceptual_stack(p.image));
    }
    const auto raw_ref = feature_matrix(ref_images);
    const auto standardizer = Standardizer::fit(raw_ref);
    const auto ref_features = standardizer.apply(raw_ref);

    // Mean standardized feature per distinct finding among the references.
    std::map<prompt::FindingVector, std::pair<std::vector<double>, std::size_t>> prototypes;
    for (std::size_t i = 0; i < references.size(); ++i) {
        auto& [sum, count] = prototypes[references[i].finding];
        sum.resize(kFeatureDim, 0.0);
        for (std::size_t j = 0; j < kFeatureDim; ++j) sum[j] += ref_features.row(i)[j];
        ++count;
    }
    std::map<prompt::FindingVector, std::vector<float>> prototype;
    for (const auto& [finding, acc] : prototypes) {
        std::vector<float> v(kFeatureDim);
        for (std::size_t j = 0; j < kFeatureDim; ++j) v[j] = static_cast<float>(acc.first[j] / static_cast<double>(acc.second));
        prototype[finding] = std::move(v);
    }

    const std::size_t group = options.samples_per_condition;
    auto reference_of = [&](std::size_t i) { return (i / group) % references.size(); };
    std::vector<SampleRequest> requests(options.samples);
    for (std::size_t i = 0; i < options.samples; ++i) {
        requests[i] = {references[reference_of(i)].finding, derive_seed(options.seed, 100000 + i)};
    }

    metrics::KidOptions kid;
    kid.subset_size = std::min<std::size_t>({options.samples, options.references, 1000});
    kid.n_subsets = options.kid_subsets;
    kid.seed = derive_seed(options.seed, 2);

    SweepResult result;
    for (const double gs : options.guidance_scales) {
        const auto images = sample_cfg(model, schedule, requests, gs);
        const auto features = standardizer.apply(feature_matrix(images));
        std::vector<metrics::ActivationStack> stacks, paired_refs;
        for (std::size_t i = 0; i < images.size(); ++i) {
            stacks.push_back(perceptual_stack(images[i]));
            paired_refs.push_back(ref_stacks[reference_of(i)]);
        }

        metrics::MetricCell cell;
        if (options.samples >= 2) {
            cell.fid = metrics::fid(ref_features, features);
            const auto k = metrics::kid_unbiased(ref_features, features, kid);
            cell.kid_mean = k.mean;
            cell.kid_std = k.std;
        }
        double diversity = 0.0;
        std::size_t groups = 0;
        for (std::size_t start = 0; start + 1 < stacks.size(); start += group) {
            const std::size_t n = std::min(group, stacks.size() - start);
            if (n < 2) continue;
            diversity += metrics::lpips_diversity(std::span(stacks).subspan(start, n));
            ++groups;
        }
        if (groups > 0) cell.lpips_diversity = diversity / static_cast<double>(groups);
        cell.lpips = metrics::lpips_paired(stacks, paired_refs);
        double fidelity = 0.0;
        for (std::size_t i = 0; i < images.size(); ++i) {
            const auto& proto = prototype.at(requests[i].condition);
            const auto row = features.row(i);
            if (!is_zero(row) && !is_zero(proto)) fidelity += metrics::clip_score(row, proto);
        }
        cell.fidelity = fidelity / static_cast<double>(images.size());

        if (options.on_scale) options.on_scale(gs, cell);
        result.configs.push_back({options.model_tag, gs, cell});
    }
    result.report = metrics::build_metric_report(result.configs);
    return result;
}

}  // namespace nodulegen::diffusion
