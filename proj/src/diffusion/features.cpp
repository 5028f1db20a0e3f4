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

#include "nodulegen/diffusion/features.hpp"

#include <algorithm>
#include <cmath>

#include "nodulegen/diffusion/error.hpp"
#include "nodulegen/diffusion/phantom.hpp"

namespace nodulegen::diffusion {

std::vector<double> phantom_features(const Grid<float>& image) {
    if (image.empty() || !image.square()) {
        throw DiffusionError(DiffusionErrc::ShapeMismatch, "features need a non-empty square image");
    }
    const std::size_t n = image.rows();
    const double center = (static_cast<double>(n) - 1.0) / 2.0;
    const double ring_width = static_cast<double>(n) / 2.0 / static_cast<double>(kRadialBins);

    std::vector<double> f;
    f.reserve(kFeatureDim);

    std::vector<double> ring_sum(kRadialBins, 0.0), ring_count(kRadialBins, 0.0), hist(kHistogramBins, 0.0);
    double mass = 0.0, mx = 0.0, my = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            const double v = image(r, c);
            const double dx = static_cast<double>(c) - center;
            const double dy = static_cast<double>(r) - center;
            const auto ring = std::min(kRadialBins - 1, static_cast<std::size_t>(std::sqrt(dx * dx + dy * dy) / ring_width));
            ring_sum[ring] += v;
            ring_count[ring] += 1.0;
            const auto bin = std::min(kHistogramBins - 1,
                                      static_cast<std::size_t>(std::clamp(v, 0.0, 1.0) * static_cast<double>(kHistogramBins)));
            hist[bin] += 1.0;
            const double w = std::max(0.0, v - kPhantomBackground);
            mass += w;
            mx += w * dx;
            my += w * dy;
        }
    }
    for (std::size_t k = 0; k < kRadialBins; ++k) f.push_back(ring_count[k] > 0 ? ring_sum[k] / ring_count[k] : 0.0);
    for (const double h : hist) f.push_back(h / static_cast<double>(image.size()));

    const double side = static_cast<double>(n);
    f.push_back(mass / static_cast<double>(image.size()));
    const double cx = mass > 0 ? mx / mass : 0.0;
    const double cy = mass > 0 ? my / mass : 0.0;
    f.push_back(cx / side);
    f.push_back(cy / side);

    double mu20 = 0.0, mu02 = 0.0, mu11 = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            const double w = std::max(0.0, image(r, c) - kPhantomBackground);
            const double dx = static_cast<double>(c) - center - cx;
            const double dy = static_cast<double>(r) - center - cy;
            mu20 += w * dx * dx;
            mu02 += w * dy * dy;
            mu11 += w * dx * dy;
        }
    }
    if (mass > 0) {
        mu20 /= mass;
        mu02 /= mass;
        mu11 /= mass;
    }
    const double spread = mu20 + mu02;
    f.push_back(std::sqrt(spread) / side);
    f.push_back(spread > 0 ? std::sqrt((mu20 - mu02) * (mu20 - mu02) + 4.0 * mu11 * mu11) / spread : 0.0);

    double grad = 0.0;
    for (std::size_t r = 1; r + 1 < n; ++r) {
        for (std::size_t c = 1; c + 1 < n; ++c) {
            const double gx = (image(r, c + 1) - image(r, c - 1)) / 2.0;
            const double gy = (image(r + 1, c) - image(r - 1, c)) / 2.0;
            grad += std::sqrt(gx * gx + gy * gy);
        }
    }
    const double interior = n > 2 ? static_cast<double>((n - 2) * (n - 2)) : 1.0;
    f.push_back(grad / interior);
    return f;
}

metrics::EmbeddingMatrix feature_matrix(std::span<const Grid<float>> images) {
    std::vector<float> data;
    data.reserve(images.size() * kFeatureDim);
    for (const auto& img : images) {
        for (const double v : phantom_features(img)) data.push_back(static_cast<float>(v));
    }
    return metrics::EmbeddingMatrix(images.size(), kFeatureDim, std::move(data));
}

Standardizer Standardizer::fit(const metrics::EmbeddingMatrix& ref) {
    if (ref.rows == 0) {
        throw DiffusionError(DiffusionErrc::EmptyDataset, "no reference rows to standardize against");
    }
    Standardizer s{std::vector<double>(ref.dim, 0.0), std::vector<double>(ref.dim, 0.0)};
    for (std::size_t i = 0; i < ref.rows; ++i)
        for (std::size_t j = 0; j < ref.dim; ++j) s.mean[j] += ref.row(i)[j];
    for (auto& m : s.mean) m /= static_cast<double>(ref.rows);
    for (std::size_t i = 0; i < ref.rows; ++i) {
        for (std::size_t j = 0; j < ref.dim; ++j) {
            const double d = ref.row(i)[j] - s.mean[j];
            s.scale[j] += d * d;
        }
    }
    for (auto& v : s.scale) {
        v = std::max(std::sqrt(v / static_cast<double>(ref.rows)), kMinFeatureScale);
    }
    return s;
}

metrics::EmbeddingMatrix Standardizer::apply(const metrics::EmbeddingMatrix& m) const {
    if (m.dim != mean.size()) {
        throw DiffusionError(DiffusionErrc::ShapeMismatch, "feature dimension differs from the fitted one");
    }
    std::vector<float> data(m.data.size());
    for (std::size_t i = 0; i < m.rows; ++i) {
        for (std::size_t j = 0; j < m.dim; ++j) {
            data[i * m.dim + j] = static_cast<float>((m.row(i)[j] - mean[j]) / scale[j]);
        }
    }
    return metrics::EmbeddingMatrix(m.rows, m.dim, std::move(data), m.provider, m.row_ids);
}

namespace {

metrics::ActivationLayer gradient_layer(const Grid<float>& img) {
    const auto h = static_cast<std::uint32_t>(img.rows());
    const auto w = static_cast<std::uint32_t>(img.cols());
    metrics::ActivationLayer layer{3, h, w, {1.0f, 1.0f, 1.0f}, std::vector<float>(3ull * h * w)};
    const std::size_t plane = std::size_t{h} * w;
    for (std::uint32_t y = 0; y < h; ++y) {
        for (std::uint32_t x = 0; x < w; ++x) {
            const std::size_t at = std::size_t{y} * w + x;
            const float v = img(y, x);
            layer.values[at] = v;
            layer.values[plane + at] = (x + 1 < w ? img(y, x + 1) : v) - v;
            layer.values[2 * plane + at] = (y + 1 < h ? img(y + 1, x) : v) - v;
        }
    }
    return layer;
}

Grid<float> average_pool(const Grid<float>& img) {
    const std::size_t h = std::max<std::size_t>(1, img.rows() / 2);
    const std::size_t w = std::max<std::size_t>(1, img.cols() / 2);
    Grid<float> out(h, w);
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            float sum = 0.0f;
            int count = 0;
            for (std::size_t dy = 0; dy < 2; ++dy)
                for (std::size_t dx = 0; dx < 2; ++dx) {
                    const std::size_t yy = 2 * y + dy, xx = 2 * x + dx;
                    if (yy < img.rows() && xx < img.cols()) {
                        sum += img(yy, xx);
                        ++count;
                    }
                }
            out(y, x) = sum / static_cast<float>(count);
        }
    }
    return out;
}

}  // namespace

metrics::ActivationStack perceptual_stack(const Grid<float>& image) {
    if (image.empty()) {
        throw DiffusionError(DiffusionErrc::ShapeMismatch, "empty image");
    }
    return metrics::ActivationStack{{gradient_layer(image), gradient_layer(average_pool(image))}};
}

}  // namespace nodulegen::diffusion
