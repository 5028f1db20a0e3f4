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
#include <cstring>
#include <random>

#include "../support/fixtures.hpp"
#include "../support/reference_grid.hpp"
#include "nodulegen/metrics/clip_score.hpp"
#include "nodulegen/metrics/embedding.hpp"
#include "nodulegen/metrics/frechet.hpp"
#include "nodulegen/metrics/kid.hpp"
#include "nodulegen/metrics/lpips.hpp"
#include "nodulegen/metrics/report.hpp"

using namespace nodulegen;
using namespace nodulegen::metrics;

namespace {

EmbeddingMatrix gaussian_rows(std::mt19937_64& rng, std::size_t n, std::size_t d, double shift = 0.0,
                              double scale = 1.0) {
    std::normal_distribution<double> z(0.0, 1.0);
    std::vector<float> v(n * d);
    for (auto& x : v) x = static_cast<float>(shift + scale * z(rng));
    return EmbeddingMatrix(n, d, std::move(v));
}

GaussianMoments moments_1d(double mean, double var) {
    GaussianMoments m;
    m.mean = Eigen::VectorXd::Constant(1, mean);
    m.cov = Eigen::MatrixXd::Constant(1, 1, var);
    return m;
}

Eigen::MatrixXd random_spd(std::mt19937_64& rng, int d) {
    std::normal_distribution<double> z(0.0, 1.0);
    Eigen::MatrixXd a(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) a(i, j) = z(rng);
    return a * a.transpose() + 0.1 * Eigen::MatrixXd::Identity(d, d);
}

// Unbiased MMD^2 by explicit loops over every kernel evaluation.
double mmd2_oracle(const EmbeddingMatrix& x, const EmbeddingMatrix& y) {
    const double d = static_cast<double>(x.dim);
    auto k = [&](std::span<const float> a, std::span<const float> b) {
        double dot = 0;
        for (std::size_t i = 0; i < a.size(); ++i) dot += double(a[i]) * double(b[i]);
        const double base = dot / d + 1.0;
        return base * base * base;
    };
    const double m = static_cast<double>(x.rows);
    const double n = static_cast<double>(y.rows);
    double sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < x.rows; ++i)
        for (std::size_t j = 0; j < x.rows; ++j)
            if (i != j) sxx += k(x.row(i), x.row(j));
    for (std::size_t i = 0; i < y.rows; ++i)
        for (std::size_t j = 0; j < y.rows; ++j)
            if (i != j) syy += k(y.row(i), y.row(j));
    for (std::size_t i = 0; i < x.rows; ++i)
        for (std::size_t j = 0; j < y.rows; ++j) sxy += k(x.row(i), y.row(j));
    return sxx / (m * (m - 1)) + syy / (n * (n - 1)) - 2 * sxy / (m * n);
}

ActivationStack constant_stack(std::uint32_t c, std::uint32_t h, std::uint32_t w, float value) {
    ActivationLayer layer{c, h, w, std::vector<float>(c, 1.0f), std::vector<float>(std::size_t{c} * h * w, value)};
    return ActivationStack{{layer}};
}

ActivationStack random_stack(std::mt19937_64& rng) {
    std::normal_distribution<float> z(0.0f, 1.0f);
    ActivationStack s;
    for (auto [c, h, wd] : std::vector<std::array<std::uint32_t, 3>>{{3, 4, 4}, {5, 2, 3}}) {
        ActivationLayer layer;
        layer.channels = c;
        layer.height = h;
        layer.width = wd;
        for (std::uint32_t i = 0; i < c; ++i) layer.weights.push_back(0.1f * static_cast<float>(i + 1));
        for (std::size_t i = 0; i < std::size_t{c} * h * wd; ++i) layer.values.push_back(z(rng));
        s.layers.push_back(layer);
    }
    return s;
}

template <typename E>
MetricsErrc error_code(E&& fn) {
    try {
        fn();
    } catch (const MetricsError& e) {
        return e.code();
    }
    FAIL("no MetricsError thrown");
    return MetricsErrc::InvalidArgument;
}

}  // namespace

TEST_CASE("moment fitting") {
    const auto m = fit_moments(EmbeddingMatrix(2, 1, {0.0f, 2.0f}));
    CHECK(m.mean(0) == 1.0);
    CHECK(m.cov(0, 0) == 2.0);

    const auto same = fit_moments(EmbeddingMatrix(3, 2, {1, 2, 1, 2, 1, 2}));
    CHECK(same.cov.isZero(0.0));
    CHECK(error_code([] { (void)fit_moments(EmbeddingMatrix(1, 3, {1, 2, 3})); }) == MetricsErrc::TooFewRows);

    std::mt19937_64 rng(50);
    const auto e = gaussian_rows(rng, 50, 4);
    const auto fit = fit_moments(e);
    for (std::size_t a = 0; a < 4; ++a) {
        double mean_a = 0;
        for (std::size_t i = 0; i < 50; ++i) mean_a += e.row(i)[a];
        mean_a /= 50;
        CHECK(fit.mean(a) == doctest::Approx(mean_a).epsilon(1e-12));
        for (std::size_t b = 0; b < 4; ++b) {
            double mean_b = 0;
            for (std::size_t i = 0; i < 50; ++i) mean_b += e.row(i)[b];
            mean_b /= 50;
            double s = 0;
            for (std::size_t i = 0; i < 50; ++i) s += (e.row(i)[a] - mean_a) * (e.row(i)[b] - mean_b);
            CHECK(std::abs(fit.cov(a, b) - s / 49) < 1e-9);
        }
    }
    CHECK(fit.cov == fit.cov.transpose());
}

TEST_CASE("Frechet distance examples") {
    CHECK(frechet_distance(moments_1d(0, 1), moments_1d(3, 1)) == doctest::Approx(9.0).epsilon(1e-12));
    CHECK(frechet_distance(moments_1d(2, 4), moments_1d(2, 1)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(frechet_distance(moments_1d(2, 4), moments_1d(2, 4)) == 0.0);
    GaussianMoments a = moments_1d(0, 1), b;
    b.mean = Eigen::VectorXd::Zero(2);
    b.cov = Eigen::MatrixXd::Identity(2, 2);
    CHECK(error_code([&] { (void)frechet_distance(a, b); }) == MetricsErrc::DimensionMismatch);
}

TEST_CASE("Frechet distance matches the 1-D closed form") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> mu(-50, 50), sd(0.0, 20);
    for (int i = 0; i < 1000; ++i) {
        const double m1 = mu(rng), m2 = mu(rng), s1 = sd(rng), s2 = sd(rng);
        const double expected = (m1 - m2) * (m1 - m2) + (s1 - s2) * (s1 - s2);
        const double got = frechet_distance(moments_1d(m1, s1 * s1), moments_1d(m2, s2 * s2));
        CHECK(std::abs(got - expected) <= 1e-9 * std::max(1.0, expected));
    }
}

TEST_CASE("Frechet distance on 2x2 covariances matches the trace-root identity") {
    // For a 2x2 matrix M with non-negative eigenvalues, tr sqrt(M) = sqrt(tr M + 2 sqrt(det M)).
    std::mt19937_64 rng(2);
    std::normal_distribution<double> z(0, 1);
    for (int i = 0; i < 200; ++i) {
        GaussianMoments a, b;
        a.mean = Eigen::Vector2d(z(rng), z(rng));
        b.mean = Eigen::Vector2d(z(rng), z(rng));
        a.cov = random_spd(rng, 2);
        b.cov = random_spd(rng, 2);
        const Eigen::Matrix2d prod = a.cov * b.cov;
        const double tr_root = std::sqrt(prod.trace() + 2 * std::sqrt(prod.determinant()));
        const double expected = (a.mean - b.mean).squaredNorm() + a.cov.trace() + b.cov.trace() - 2 * tr_root;
        CHECK(frechet_distance(a, b) == doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("Frechet distance properties in higher dimension") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 20; ++i) {
        const int d = 2 + i % 9;
        GaussianMoments a, b;
        a.mean = Eigen::VectorXd::Random(d);
        b.mean = Eigen::VectorXd::Random(d);
        a.cov = random_spd(rng, d);
        b.cov = random_spd(rng, d);
        const double ab = frechet_distance(a, b);
        CHECK(ab >= 0.0);
        CHECK(ab == doctest::Approx(frechet_distance(b, a)).epsilon(1e-8));
        CHECK(std::abs(frechet_distance(a, a)) < 1e-8 * a.cov.trace());
        // Commuting (diagonal) covariances reduce to per-axis 1-D terms.
        GaussianMoments da = a, db = b;
        da.cov = a.cov.diagonal().asDiagonal();
        db.cov = b.cov.diagonal().asDiagonal();
        double expected = (a.mean - b.mean).squaredNorm();
        for (int k = 0; k < d; ++k) {
            const double diff = std::sqrt(da.cov(k, k)) - std::sqrt(db.cov(k, k));
            expected += diff * diff;
        }
        CHECK(frechet_distance(da, db) == doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("rank-deficient covariances stay non-negative") {
    std::mt19937_64 rng(4);
    const auto a = gaussian_rows(rng, 3, 16);
    const auto b = gaussian_rows(rng, 3, 16);
    CHECK(fid(a, b) >= 0.0);
    CHECK(fid(a, a) < 1e-9);
}

TEST_CASE("moment validation") {
    GaussianMoments m = moments_1d(0, 1);
    CHECK_NOTHROW(validate(m));
    m.mean = Eigen::VectorXd::Zero(2);
    m.cov = Eigen::Matrix2d{{1.0, 0.5}, {0.4, 1.0}};
    CHECK(error_code([&] { validate(m); }) == MetricsErrc::InvalidArgument);
    m.cov = Eigen::Matrix2d{{1.0, 0.0}, {0.0, -1.0}};
    CHECK(error_code([&] { validate(m); }) == MetricsErrc::InvalidArgument);
}

TEST_CASE("polynomial kernel") {
    const std::vector<float> zero(4, 0.0f);
    CHECK(poly_kernel(zero, zero) == 1.0);
    const std::vector<float> unit{1, -1, 1, -1};
    CHECK(poly_kernel(unit, unit) == 8.0);
    const std::vector<float> x{0.5f, 2.0f, -1.0f}, y{4.0f, 0.25f, 3.0f};
    // x.y = 2 + 0.5 - 3 = -0.5; (-0.5 / 3 + 1)^3 = (5/6)^3.
    CHECK(poly_kernel(x, y) == doctest::Approx(125.0 / 216.0).epsilon(1e-15));
    CHECK(poly_kernel(x, y, {2, 1.0, 0.0}) == doctest::Approx(0.25));
    CHECK(error_code([&] { (void)poly_kernel(x, unit); }) == MetricsErrc::DimensionMismatch);
}

TEST_CASE("KID on full sets equals the double-loop oracle") {
    std::mt19937_64 rng(64);
    for (std::size_t m : {2u, 5u, 64u, 128u}) {
        const auto x = gaussian_rows(rng, m, 2);
        const auto y = gaussian_rows(rng, m, 2, 0.3);
        const double oracle = mmd2_oracle(x, y);
        KidOptions opt;
        opt.subset_size = m;
        opt.n_subsets = 1;
        opt.seed = 9;
        const auto r = kid_unbiased(x, y, opt);
        CHECK(std::abs(r.mean - oracle) < 1e-9);
        CHECK(r.std == 0.0);
        CHECK(std::abs(mmd2_unbiased(x, y) - oracle) < 1e-9);
    }
    const auto x = gaussian_rows(rng, 10, 3);
    const auto y = gaussian_rows(rng, 14, 3);
    CHECK(std::abs(mmd2_unbiased(x, y) - mmd2_oracle(x, y)) < 1e-9);
}

TEST_CASE("KID edge cases") {
    const EmbeddingMatrix zx(4, 3, std::vector<float>(12, 0.0f));
    const EmbeddingMatrix zy(5, 3, std::vector<float>(15, 0.0f));
    KidOptions opt;
    opt.subset_size = 4;
    opt.n_subsets = 3;
    CHECK(kid_unbiased(zx, zy, opt).mean == 0.0);
    opt.subset_size = 5;
    CHECK(error_code([&] { (void)kid_unbiased(zx, zy, opt); }) == MetricsErrc::SubsetTooLarge);
    CHECK(error_code([&] { (void)kid_unbiased(EmbeddingMatrix(1, 3, {0, 0, 0}), zy); }) == MetricsErrc::TooFewRows);
    CHECK(error_code([&] { (void)kid_unbiased(zx, EmbeddingMatrix(2, 2, {0, 0, 0, 0})); }) ==
          MetricsErrc::DimensionMismatch);
}

TEST_CASE("KID is near zero for samples of one distribution and deterministic per seed") {
    std::mt19937_64 rng(77);
    const auto x = gaussian_rows(rng, 400, 8);
    const auto y = gaussian_rows(rng, 400, 8);
    KidOptions opt;
    opt.subset_size = 200;
    opt.n_subsets = 50;
    opt.seed = 5;
    const auto r = kid_unbiased(x, y, opt);
    CHECK(std::abs(r.mean) < 3 * r.std + 1e-12);
    const auto again = kid_unbiased(x, y, opt);
    CHECK(again.mean == r.mean);
    CHECK(again.std == r.std);

    const auto shifted = gaussian_rows(rng, 400, 8, 1.0);
    CHECK(kid_unbiased(x, shifted, opt).mean > 10 * r.std);
}

TEST_CASE("LPIPS examples and invariances") {
    const auto a = constant_stack(1, 3, 3, 3.0f);
    const auto b = constant_stack(1, 3, 3, -2.0f);
    CHECK(lpips_distance(a, b) == 4.0);
    CHECK(lpips_distance(a, a) == 0.0);
    // Zero activations stay zero after normalization.
    CHECK(lpips_distance(a, constant_stack(1, 3, 3, 0.0f)) == 1.0);

    std::mt19937_64 rng(13);
    for (int i = 0; i < 20; ++i) {
        const auto x = random_stack(rng);
        const auto y = random_stack(rng);
        auto x2 = x, y3 = y;
        for (auto& l : x2.layers)
            for (auto& v : l.values) v *= 2.0f;
        for (auto& l : y3.layers)
            for (auto& v : l.values) v *= 0.5f;
        const double d = lpips_distance(x, y);
        CHECK(d >= 0.0);
        CHECK(lpips_distance(x2, y3) == doctest::Approx(d).epsilon(1e-6));
        CHECK(lpips_distance(y, x) == doctest::Approx(d).epsilon(1e-12));
        CHECK(lpips_distance(x, x) == 0.0);
    }

    CHECK(error_code([&] { (void)lpips_distance(a, constant_stack(1, 3, 2, 1.0f)); }) == MetricsErrc::ShapeMismatch);
    auto neg = a;
    neg.layers[0].weights[0] = -1.0f;
    CHECK(error_code([&] { validate(neg); }) == MetricsErrc::InvalidArgument);
}

TEST_CASE("LPIPS set aggregation") {
    const std::vector<ActivationStack> gen{constant_stack(1, 2, 2, 1.0f), constant_stack(1, 2, 2, -1.0f),
                                           constant_stack(1, 2, 2, 5.0f)};
    const std::vector<ActivationStack> ref{constant_stack(1, 2, 2, 1.0f), constant_stack(1, 2, 2, 1.0f),
                                           constant_stack(1, 2, 2, 1.0f)};
    CHECK(lpips_paired(gen, ref) == doctest::Approx(4.0 / 3.0));
    // Pairs: (1,-1)=4, (1,5)=0, (-1,5)=4.
    CHECK(lpips_diversity(gen) == doctest::Approx(8.0 / 3.0));
    CHECK(error_code([&] { (void)lpips_paired(gen, std::span(ref).first(2)); }) == MetricsErrc::ShapeMismatch);
}

TEST_CASE("CLIPScore") {
    const std::vector<float> t{1.0f, 2.0f, 3.0f};
    const std::vector<float> p{2.0f, 4.0f, 6.0f};
    CHECK(clip_score(p, t) == 2.5);
    const std::vector<float> o{3.0f, 0.0f, -1.0f};
    CHECK(clip_score(o, t) == 0.0);
    const std::vector<float> u{1.0f, 0.0f}, v{-0.4f, std::sqrt(1.0f - 0.16f)};
    CHECK(cosine_similarity(u, v) == doctest::Approx(-0.4).epsilon(1e-6));
    CHECK(clip_score(u, v) == 0.0);
    const std::vector<float> zero(3, 0.0f);
    CHECK(error_code([&] { (void)clip_score(zero, t); }) == MetricsErrc::ZeroVector);

    std::mt19937_64 rng(21);
    std::normal_distribution<float> z(0, 1);
    for (int i = 0; i < 50; ++i) {
        std::vector<float> a(6), b(6);
        for (auto& x : a) x = z(rng);
        for (auto& x : b) x = z(rng);
        auto a3 = a;
        for (auto& x : a3) x *= 3.0f;
        CHECK(clip_score(a3, b) == doctest::Approx(clip_score(a, b)).epsilon(1e-6));
    }
}

TEST_CASE("mean CLIPScore over a set with mean cosine 0.2652") {
    const std::vector<double> cosines{0.2, 0.3304, 0.2652};
    std::vector<float> img, txt;
    for (double c : cosines) {
        img.push_back(static_cast<float>(c));
        img.push_back(static_cast<float>(std::sqrt(1 - c * c)));
        txt.push_back(1.0f);
        txt.push_back(0.0f);
    }
    const EmbeddingMatrix images(3, 2, img, providers::kClip), texts(3, 2, txt, providers::kClip);
    CHECK(mean_clip_score(images, texts) == doctest::Approx(0.663).epsilon(1e-6));
}

TEST_CASE("report over the reference grid") {
    const auto report = build_metric_report(testing::reference_configs(),
                                            {testing::kRealClipScore, testing::kRealBioClipScore});
    const ConfigKey best{"SDv2", 5.0};
    CHECK(report.best.at(Metric::Fid) == best);
    CHECK(*report.cell("SDv2", 5).fid == 96.34);
    CHECK(report.best.at(Metric::Kid) == best);
    CHECK(report.best.at(Metric::Lpips) == best);
    CHECK(report.best.at(Metric::ClipScore) == best);
    CHECK(report.best.at(Metric::BioClipScore) == best);
    CHECK(report.best.count(Metric::Fidelity) == 0);
    CHECK(report.models == std::vector<std::string>{"SDv1", "SDv2"});
    CHECK(report.guidance_scales.size() == 7);

    const auto table = render_table(report);
    CHECK(table.find("Metrics\tModels\tGS5\tGS10\tGS20\tGS30\tGS40\tGS50\tGS60\n") == 0);
    CHECK(table.find("FID(↓)\tSDv1\t114.04\t115.00\t132.20") != std::string::npos);
    CHECK(table.find("\tSDv2\t96.34*\t103.10") != std::string::npos);
    CHECK(table.find("0.663*") != std::string::npos);
    CHECK(table.find("0.617") != std::string::npos);
    CHECK(table.find("0.840") != std::string::npos);
    CHECK(table.find("Fidelity") == std::string::npos);

    auto broken = testing::reference_configs();
    broken.erase(broken.begin() + 9);
    CHECK(error_code([&] { (void)build_metric_report(broken); }) == MetricsErrc::IncompleteGrid);
    auto dup = testing::reference_configs();
    dup.push_back(dup.front());
    CHECK(error_code([&] { (void)build_metric_report(dup); }) == MetricsErrc::IncompleteGrid);
    CHECK(error_code([&] { (void)build_metric_report({}); }) == MetricsErrc::IncompleteGrid);

    const auto back = cell_from_json(to_json(report.cell("SDv1", 30)));
    CHECK(back.fid == report.cell("SDv1", 30).fid);
    CHECK_FALSE(back.fidelity.has_value());
}

TEST_CASE("single configuration is best everywhere") {
    MetricCell cell;
    cell.fid = 10;
    cell.clipscore = 0.5;
    const auto report = build_metric_report({{"M", 7.5, cell}});
    CHECK(report.best.at(Metric::Fid) == ConfigKey{"M", 7.5});
    CHECK(report.best.at(Metric::ClipScore) == ConfigKey{"M", 7.5});
    CHECK(format_gs(7.5) == "7.5");
}

TEST_CASE("best cells match an exhaustive scan on random grids") {
    std::mt19937_64 rng(8);
    std::uniform_int_distribution<int> v(0, 20);  // coarse values force ties
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<ConfigMetrics> configs;
        const std::vector<std::string> models{"B", "A", "C"};
        const std::vector<double> scales{60, 5, 20};
        for (const auto& m : models)
            for (double gs : scales) {
                MetricCell c;
                c.fid = v(rng);
                c.bioclipscore = v(rng);
                configs.push_back({m, gs, c});
            }
        std::shuffle(configs.begin() + 1, configs.end(), rng);
        const auto report = build_metric_report(configs);
        // Scan order: models by first appearance, then ascending GS.
        std::optional<std::pair<double, ConfigKey>> lo, hi;
        for (const auto& m : report.models)
            for (double gs : {5.0, 20.0, 60.0})
                for (const auto& c : configs)
                    if (c.model == m && c.guidance_scale == gs) {
                        if (!lo || *c.values.fid < lo->first) lo = {{*c.values.fid, {m, gs}}};
                        if (!hi || *c.values.bioclipscore > hi->first) hi = {{*c.values.bioclipscore, {m, gs}}};
                    }
        CHECK(report.best.at(Metric::Fid) == lo->second);
        CHECK(report.best.at(Metric::BioClipScore) == hi->second);
    }
}

TEST_CASE("EMB1 layout and round-trip") {
    const EmbeddingMatrix m(2, 2, {1.0f, -2.0f, 0.5f, 3.0f}, providers::kBioClip, {"a", "b"});
    const auto bytes = encode_emb1(m);
    REQUIRE(bytes.size() == 4 + 4 + 4 + 1 + 7 + 16 + 4);
    CHECK(std::memcmp(bytes.data(), "EMB1", 4) == 0);
    CHECK(bytes[4] == 2);
    CHECK(bytes[8] == 2);
    CHECK(bytes[12] == 7);
    CHECK(std::memcmp(bytes.data() + 13, "bioclip", 7) == 0);
    float first = 0;
    std::memcpy(&first, bytes.data() + 20, 4);
    CHECK(first == 1.0f);
    CHECK(std::memcmp(bytes.data() + 36, "a\nb\n", 4) == 0);
    CHECK(decode_emb1(bytes) == m);

    const auto path = (testing::scratch_dir("emb1") / "m.emb1").string();
    write_emb1(path, m);
    CHECK(read_emb1(path) == m);

    auto truncated = bytes;
    truncated.resize(30);
    CHECK(error_code([&] { (void)decode_emb1(truncated); }) == MetricsErrc::BadFormat);
    auto bad_magic = bytes;
    bad_magic[0] = 'X';
    CHECK(error_code([&] { (void)decode_emb1(bad_magic); }) == MetricsErrc::BadFormat);
    auto nan = bytes;
    const float q = std::nanf("");
    std::memcpy(nan.data() + 24, &q, 4);
    CHECK(error_code([&] { (void)decode_emb1(nan); }) == MetricsErrc::NonFinite);
    CHECK(error_code([] { (void)EmbeddingMatrix(2, 2, {1, 2, 3}); }) == MetricsErrc::ShapeMismatch);
}

TEST_CASE("ACT1 round-trip with several records") {
    std::mt19937_64 rng(31);
    const std::vector<ActivationStack> stacks{random_stack(rng), random_stack(rng), constant_stack(2, 1, 1, 0.5f)};
    const auto path = (testing::scratch_dir("act1") / "s.act1").string();
    write_act1(path, stacks);
    CHECK(read_act1(path) == stacks);
    auto bytes = encode_act1(stacks[2]);
    CHECK(std::memcmp(bytes.data(), "ACT1", 4) == 0);
    REQUIRE(bytes.size() == 4 + 4 + 12 + 8 + 8);
    bytes.pop_back();
    CHECK(error_code([&] { (void)decode_act1(bytes); }) == MetricsErrc::BadFormat);
}
