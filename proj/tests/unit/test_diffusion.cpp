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


#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>
#include <vector>

#include "nodulegen/diffusion/denoiser.hpp"
#include "nodulegen/diffusion/features.hpp"
#include "nodulegen/diffusion/phantom.hpp"
#include "nodulegen/diffusion/sampler.hpp"
#include "nodulegen/diffusion/schedule.hpp"
#include "nodulegen/diffusion/sweep.hpp"
#include "nodulegen/diffusion/train.hpp"
#include "nodulegen/metrics/lpips.hpp"
#include "nodulegen/common/random.hpp"
#include "../support/fixtures.hpp"

using namespace nodulegen;
using namespace nodulegen::diffusion;

namespace {

template <typename F>
DiffusionErrc diffusion_error(F&& f) {
    try {
        f();
    } catch (const DiffusionError& e) {
        return e.code();
    }
    FAIL("no DiffusionError thrown");
    return DiffusionErrc::InvalidRange;
}

std::vector<TrainingExample> examples(std::size_t count, std::uint64_t seed, std::size_t size) {
    std::vector<TrainingExample> out;
    for (auto& p : phantom_corpus(count, seed, size)) out.push_back({std::move(p.image), p.finding});
    return out;
}

DenoiserConfig tiny_config() {
    DenoiserConfig c;
    c.pixels = 4;
    c.hidden = 3;
    c.time_features = 2;
    c.steps = 10;
    return c;
}

}  // namespace

TEST_CASE("single-step schedule with beta 0.5") {
    const auto s = make_schedule(1, 0.5, 0.5);
    REQUIRE(s.steps() == 1);
    CHECK(s.alpha_bar(1) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(s.alpha_bar_prev(1) == 1.0);
}

TEST_CASE("constant beta gives a geometric alpha_bar") {
    const double b = 0.03;
    const auto s = make_schedule(50, b, b);
    for (std::size_t t = 1; t <= 50; ++t) {
        CHECK(s.alpha_bar(t) == doctest::Approx(std::pow(1.0 - b, static_cast<double>(t))).epsilon(1e-12));
    }
}

TEST_CASE("default schedule at T=1000 nearly destroys the signal") {
    const auto s = make_schedule(1000);
    CHECK(s.beta(1) == doctest::Approx(1e-4));
    CHECK(s.beta(1000) == doctest::Approx(0.02));
    CHECK(s.alpha_bar(1000) < 1e-4);
    for (std::size_t t = 2; t <= 1000; ++t) {
        CHECK(s.alpha_bar(t) < s.alpha_bar(t - 1));
    }
}

TEST_CASE("scaled schedule reaches the same endpoint at short T") {
    const auto ref = make_schedule(1000);
    const auto s = make_scaled_schedule(200);
    CHECK(s.steps() == 200);
    CHECK(std::log(s.alpha_bar(200)) == doctest::Approx(std::log(ref.alpha_bar(1000))).epsilon(0.05));
}

TEST_CASE("schedule rejects bad ranges") {
    CHECK(diffusion_error([] { (void)make_schedule(0); }) == DiffusionErrc::InvalidRange);
    CHECK(diffusion_error([] { (void)make_schedule(10, 0.0, 0.02); }) == DiffusionErrc::InvalidRange);
    CHECK(diffusion_error([] { (void)make_schedule(10, 0.1, 1.0); }) == DiffusionErrc::InvalidRange);
    CHECK(diffusion_error([] { (void)make_schedule(10, 0.05, 0.01); }) == DiffusionErrc::InvalidRange);
}

TEST_CASE("forward diffusion matches its marginal moments") {
    const auto s = make_schedule(1000);
    const std::size_t t = 300;
    const std::vector<double> x0{0.7};
    const double ab = s.alpha_bar(t);
    const double mean = std::sqrt(ab) * x0[0];
    const double var = 1.0 - ab;

    NormalSource noise(99);
    const std::size_t n = 100000;
    double sum = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = forward_diffuse(x0, t, s, noise)[0];
        sum += v;
        sq += v * v;
    }
    const double m = sum / static_cast<double>(n);
    const double v = sq / static_cast<double>(n) - m * m;
    CHECK(std::abs(m - mean) < 5.0 * std::sqrt(var / static_cast<double>(n)));
    CHECK(std::abs(v - var) < 0.05 * var);
}

TEST_CASE("forward diffusion is the closed form for a given eps") {
    const auto s = make_schedule(100);
    const std::vector<double> x0{1.0, -0.5, 0.0};
    const std::vector<double> eps{0.2, 1.0, -2.0};
    std::vector<double> out(3);
    forward_diffuse_with(x0, eps, 40, s, out);
    const double ab = s.alpha_bar(40);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(out[i] == doctest::Approx(std::sqrt(ab) * x0[i] + std::sqrt(1.0 - ab) * eps[i]).epsilon(1e-14));
    }
    NormalSource noise(1);
    CHECK(diffusion_error([&] { (void)forward_diffuse(x0, 0, s, noise); }) == DiffusionErrc::StepOutOfRange);
    CHECK(diffusion_error([&] { (void)forward_diffuse(x0, 101, s, noise); }) == DiffusionErrc::StepOutOfRange);
}

TEST_CASE("condition rows") {
    CHECK(condition_rows(std::nullopt) == std::vector<std::size_t>{kNullRow});
    const prompt::FindingVector f{.sphericity = 5, .margin = 1, .texture = 3, .spiculation = 2, .calcified = true};
    const auto rows = condition_rows(f);
    REQUIRE(rows.size() == 5);
    for (const auto r : rows) CHECK(r < kNullRow);
    CHECK(rows != condition_rows(prompt::FindingVector{}));
}

TEST_CASE("analytic gradient agrees with finite differences") {
    const auto sched = make_schedule(10);
    const Denoiser model(tiny_config(), sched, 5);

    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    std::vector<std::vector<double>> xs(4, std::vector<double>(4));
    for (auto& x : xs) for (auto& v : x) v = g(rng);
    std::vector<DenoiserInput> batch{
        {xs[0], 1, prompt::FindingVector{}},
        {xs[1], 4, std::nullopt},
        {xs[2], 7, prompt::FindingVector{.sphericity = 2, .margin = 3, .texture = 1, .spiculation = 4, .calcified = true}},
        {xs[3], 10, std::nullopt},
    };
    Eigen::MatrixXd targets(4, 4);
    for (Eigen::Index i = 0; i < targets.size(); ++i) targets.data()[i] = g(rng);

    Eigen::VectorXd grad;
    (void)model.loss(batch, targets, &grad);
    REQUIRE(static_cast<std::size_t>(grad.size()) == model.parameter_count());

    const double h = 1e-6;
    Denoiser probe = model;
    for (Eigen::Index k = 0; k < grad.size(); ++k) {
        const double saved = probe.parameters()[k];
        probe.parameters()[k] = saved + h;
        const double up = probe.loss(batch, targets);
        probe.parameters()[k] = saved - h;
        const double down = probe.loss(batch, targets);
        probe.parameters()[k] = saved;
        const double numeric = (up - down) / (2.0 * h);
        const double scale = std::max(std::abs(numeric), std::abs(grad[k]));
        INFO("parameter " << k);
        CHECK(std::abs(grad[k] - numeric) <= 1e-4 * scale + 1e-9);
    }
}

TEST_CASE("output skip is the linear eps estimate") {
    const auto sched = make_schedule(10);
    const Denoiser model(tiny_config(), sched, 5);
    const double sigma = tiny_config().skip_sigma;
    for (std::size_t t = 1; t <= 10; ++t) {
        const double ab = sched.alpha_bar(t);
        const double s = std::sqrt(1.0 - ab);
        CHECK(model.skip(t) == doctest::Approx(s / (s * s + ab * sigma * sigma)).epsilon(1e-12));
    }
}

TEST_CASE("guidance combination identities") {
    Eigen::MatrixXd cond(2, 2), null(2, 2);
    cond << 1.0, -2.0, 0.5, 3.0;
    null << 0.25, 1.0, -1.0, 0.0;
    CHECK(cfg_combine(cond, null, 0.0) == null);
    CHECK(cfg_combine(cond, null, 1.0) == cond);
    CHECK(cfg_combine(cond, cond, 7.5) == cond);
    const Eigen::MatrixXd expect = cond + 4.0 * (cond - null);
    CHECK((cfg_combine(cond, null, 5.0) - expect).norm() < 1e-14);
}

TEST_CASE("perfect disc phantom is symmetric and maximally spherical") {
    PhantomSpec spec;
    spec.size = 32;
    spec.radius = 8.0;
    const auto p = make_phantom(spec);
    CHECK(p.finding.sphericity == 5);
    CHECK(p.finding.spiculation == 1);
    CHECK(p.finding.margin == 5);
    CHECK_FALSE(p.finding.calcified);
    const std::size_t n = spec.size;
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            const float v = p.image(r, c);
            CHECK(v == p.image(c, r));
            CHECK(v == p.image(n - 1 - r, c));
            CHECK(v == p.image(r, n - 1 - c));
        }
    }
    CHECK(p.image(16, 16) == doctest::Approx(kPhantomSolid));
    CHECK(p.image(0, 0) == doctest::Approx(kPhantomBackground));
}

TEST_CASE("phantom findings follow the rendering bins") {
    PhantomSpec spec;
    spec.eccentricity = 0.6;
    spec.edge_blur = 1.2;
    spec.spike_count = 6;
    spec.spike_amplitude = 4.0;
    spec.fill = FillMode::PartSolid;
    const auto f = finding_for(spec);
    CHECK(f.sphericity == 2);
    CHECK(f.margin == 2);
    CHECK(f.spiculation == 5);
    CHECK(f.texture == 3);
}

TEST_CASE("spikes only add mass outside the base radius") {
    PhantomSpec plain;
    plain.radius = 6.0;
    PhantomSpec spiked = plain;
    spiked.spike_count = 5;
    spiked.spike_amplitude = 3.0;
    const auto a = make_phantom(plain).image;
    const auto b = make_phantom(spiked).image;
    const double cx = 15.5;
    bool changed = false;
    for (std::size_t r = 0; r < 32; ++r) {
        for (std::size_t c = 0; c < 32; ++c) {
            const double rho = std::hypot(static_cast<double>(c) - cx, static_cast<double>(r) - cx);
            if (rho <= plain.radius) CHECK(a(r, c) == b(r, c));
            if (a(r, c) != b(r, c)) {
                CHECK(rho > plain.radius);
                CHECK(b(r, c) > a(r, c));
                changed = true;
            }
        }
    }
    CHECK(changed);
}

TEST_CASE("phantoms are deterministic and validated") {
    CHECK(phantom_corpus(20, 4, 32)[13].image == phantom_corpus(20, 4, 32)[13].image);
    PhantomSpec big;
    big.radius = 15.0;
    big.spike_amplitude = 2.0;
    CHECK(diffusion_error([&] { (void)make_phantom(big); }) == DiffusionErrc::InvalidSpec);
    PhantomSpec flat;
    flat.eccentricity = 1.0;
    CHECK(diffusion_error([&] { (void)make_phantom(flat); }) == DiffusionErrc::InvalidSpec);
}

TEST_CASE("features have a fixed width and standardize references to zero mean") {
    const auto corpus = phantom_corpus(40, 8, 32);
    std::vector<Grid<float>> images;
    for (const auto& p : corpus) images.push_back(p.image);
    CHECK(phantom_features(images[0]).size() == kFeatureDim);
    const auto m = feature_matrix(images);
    const auto z = Standardizer::fit(m).apply(m);
    REQUIRE(z.rows == 40);
    for (std::size_t j = 0; j < z.dim; ++j) {
        double sum = 0.0;
        for (std::size_t i = 0; i < z.rows; ++i) sum += z.row(i)[j];
        CHECK(std::abs(sum / 40.0) < 1e-5);
    }
}

TEST_CASE("model space round trip") {
    const auto img = phantom_corpus(1, 2, 16)[0].image;
    const auto x = to_model_space(img);
    for (const auto v : x) {
        CHECK(v >= -1.0);
        CHECK(v <= 1.0);
    }
    const auto back = from_model_space(x, 16);
    for (std::size_t i = 0; i < img.size(); ++i) CHECK(back.values()[i] == doctest::Approx(img.values()[i]).epsilon(1e-6));
}

TEST_CASE("zero epochs leaves the initialization untouched") {
    const auto sched = make_scaled_schedule(20);
    const auto data = examples(8, 1, 16);
    TrainOptions opt;
    opt.epochs = 0;
    opt.model.pixels = 256;
    opt.model.hidden = 16;
    opt.model.steps = 20;
    const auto r = train_denoiser(data, sched, opt);
    CHECK(r.model == Denoiser(opt.model, sched, derive_seed(opt.seed, 0)));
    CHECK(r.loss_curve.empty());
    CHECK(r.initial_loss == r.final_loss);
}

TEST_CASE("training lowers the probe loss") {
    const auto sched = make_scaled_schedule(50);
    const auto data = examples(200, 21, 16);
    TrainOptions opt;
    opt.epochs = 50;
    opt.learning_rate = 0.5;
    opt.model.pixels = 256;
    opt.model.hidden = 64;
    opt.model.steps = 50;
    const auto r = train_denoiser(data, sched, opt);
    REQUIRE(r.loss_curve.size() == 50);
    CHECK(r.final_loss < 0.8 * r.initial_loss);
    CHECK(r.loss_curve.back() < r.loss_curve.front());
}

TEST_CASE("training rejects an empty or mismatched dataset") {
    const auto sched = make_scaled_schedule(20);
    TrainOptions opt;
    opt.model.pixels = 256;
    CHECK(diffusion_error([&] { (void)train_denoiser({}, sched, opt); }) == DiffusionErrc::EmptyDataset);
    const auto data = examples(4, 1, 8);
    CHECK(diffusion_error([&] { (void)train_denoiser(data, sched, opt); }) == DiffusionErrc::ShapeMismatch);
}

TEST_CASE("sampling is reproducible per seed") {
    const auto sched = make_scaled_schedule(20);
    DenoiserConfig cfg;
    cfg.pixels = 64;
    cfg.hidden = 8;
    const Denoiser model(cfg, sched, 3);
    const std::vector<SampleRequest> req{{prompt::FindingVector{}, 10}, {prompt::FindingVector{.spiculation = 4}, 11}};
    const auto a = sample_cfg(model, sched, req, 5.0);
    const auto b = sample_cfg(model, sched, req, 5.0);
    REQUIRE(a.size() == 2);
    CHECK(a == b);
    CHECK(a[0] != a[1]);
    CHECK(a[0].rows() == 8);
    for (const auto v : a[0].values()) {
        CHECK(v >= 0.0f);
        CHECK(v <= 1.0f);
    }
    const std::vector<SampleRequest> other{{prompt::FindingVector{}, 12}};
    CHECK(sample_cfg(model, sched, other, 5.0)[0] != a[0]);
    CHECK(diffusion_error([&] { (void)sample_cfg(model, make_scaled_schedule(30), req, 5.0); }) ==
          DiffusionErrc::ShapeMismatch);
}

TEST_CASE("model file round trip") {
    const auto sched = make_scaled_schedule(12);
    DenoiserConfig cfg;
    cfg.pixels = 16;
    cfg.hidden = 5;
    cfg.time_features = 4;
    const Denoiser model(cfg, sched, 17);
    CHECK(decode_model(encode_model(model)) == model);

    const auto dir = testing::scratch_dir("diffusion");
    const auto path = (dir / "model.bin").string();
    save_model(path, model);
    CHECK(load_model(path) == model);

    auto bytes = encode_model(model);
    bytes[0] = 'X';
    CHECK(diffusion_error([&] { (void)decode_model(bytes); }) == DiffusionErrc::BadModelFile);
    auto cut = encode_model(model);
    cut.resize(cut.size() - 3);
    CHECK(diffusion_error([&] { (void)decode_model(cut); }) == DiffusionErrc::BadModelFile);
    CHECK(diffusion_error([&] { (void)load_model((dir / "missing.bin").string()); }) == DiffusionErrc::BadModelFile);
}

TEST_CASE("sweep needs samples and scales") {
    const auto sched = make_scaled_schedule(10);
    DenoiserConfig cfg;
    cfg.pixels = 256;
    cfg.hidden = 8;
    const Denoiser model(cfg, sched, 1);
    SweepOptions opt;
    opt.samples = 0;
    CHECK_THROWS_AS((void)run_gs_sweep(model, sched, opt), metrics::MetricsError);
    opt.samples = 4;
    opt.guidance_scales.clear();
    CHECK_THROWS_AS((void)run_gs_sweep(model, sched, opt), metrics::MetricsError);
    opt.guidance_scales = {5};
    opt.samples_per_condition = 0;
    CHECK_THROWS_AS((void)run_gs_sweep(model, sched, opt), metrics::MetricsError);
}

TEST_CASE("sweep diversity is the mean over same-condition groups") {
    const auto sched = make_scaled_schedule(10);
    DenoiserConfig cfg;
    cfg.pixels = 256;
    cfg.hidden = 8;
    const Denoiser model(cfg, sched, 3);
    SweepOptions opt;
    opt.guidance_scales = {5};
    opt.samples = 7;
    opt.samples_per_condition = 3;
    opt.references = 4;
    opt.kid_subsets = 2;
    const auto r = run_gs_sweep(model, sched, opt);

    // Groups are samples {0,1,2}, {3,4,5}; the lone sample 6 has no pair.
    const auto refs = phantom_corpus(4, derive_seed(opt.seed, 1), 16);
    double total = 0.0;
    for (std::size_t g = 0; g < 2; ++g) {
        std::vector<SampleRequest> req;
        for (std::size_t k = 0; k < 3; ++k) {
            req.push_back({refs[g].finding, derive_seed(opt.seed, 100000 + 3 * g + k)});
        }
        std::vector<metrics::ActivationStack> stacks;
        for (const auto& im : sample_cfg(model, sched, req, 5.0)) stacks.push_back(perceptual_stack(im));
        total += metrics::lpips_diversity(stacks);
    }
    CHECK(*r.configs[0].values.lpips_diversity == doctest::Approx(total / 2.0).epsilon(1e-12));
}

TEST_CASE("small sweep fills every guidance scale") {
    const auto sched = make_scaled_schedule(10);
    DenoiserConfig cfg;
    cfg.pixels = 256;
    cfg.hidden = 8;
    const Denoiser model(cfg, sched, 1);
    SweepOptions opt;
    opt.samples = 6;
    opt.references = 12;
    opt.kid_subsets = 5;
    std::size_t calls = 0;
    opt.on_scale = [&](double, const metrics::MetricCell&) { ++calls; };
    const auto r = run_gs_sweep(model, sched, opt);
    CHECK(calls == 7);
    REQUIRE(r.configs.size() == 7);
    for (std::size_t i = 0; i < 7; ++i) {
        CHECK(r.configs[i].guidance_scale == kDefaultGuidanceScales[i]);
        const auto& v = r.configs[i].values;
        REQUIRE(v.fid.has_value());
        CHECK(*v.fid >= 0.0);
        CHECK(v.kid_mean.has_value());
        CHECK(v.lpips.has_value());
        CHECK(v.lpips_diversity.has_value());
        CHECK(v.fidelity.has_value());
    }
    CHECK(r.report.guidance_scales.size() == 7);
}
