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

#include "nodulegen/metrics/lpips.hpp"

#include <cmath>

#include "nodulegen/common/binary_io.hpp"

namespace nodulegen::metrics {

void validate(const ActivationStack& stack) {
    for (std::size_t l = 0; l < stack.layers.size(); ++l) {
        const auto& layer = stack.layers[l];
        const std::size_t expected = std::size_t{layer.channels} * layer.height * layer.width;
        if (layer.weights.size() != layer.channels || layer.values.size() != expected) {
            throw MetricsError(MetricsErrc::ShapeMismatch, "layer " + std::to_string(l) +
                                                               " sizes disagree with its shape");
        }
        if (layer.height == 0 || layer.width == 0 || layer.channels == 0) {
            throw MetricsError(MetricsErrc::ShapeMismatch, "layer " + std::to_string(l) + " is empty");
        }
        for (const float w : layer.weights) {
            if (!(w >= 0.0f)) {
                throw MetricsError(MetricsErrc::InvalidArgument,
                                   "layer " + std::to_string(l) + " has a negative channel weight");
            }
        }
        require_finite(layer.values, "activation layer " + std::to_string(l));
    }
}

namespace {

bool same_layout(const ActivationLayer& a, const ActivationLayer& b) {
    return a.channels == b.channels && a.height == b.height && a.width == b.width &&
           a.weights == b.weights;
}

}  // namespace

double lpips_distance(const ActivationStack& a, const ActivationStack& b) {
    if (a.layers.size() != b.layers.size()) {
        throw MetricsError(MetricsErrc::ShapeMismatch, "layer counts differ");
    }
    validate(a);
    validate(b);
    double total = 0.0;
    for (std::size_t l = 0; l < a.layers.size(); ++l) {
        const auto& la = a.layers[l];
        const auto& lb = b.layers[l];
        if (!same_layout(la, lb)) {
            throw MetricsError(MetricsErrc::ShapeMismatch, "layer " + std::to_string(l) + " differs");
        }
        double layer_sum = 0.0;
        for (std::uint32_t y = 0; y < la.height; ++y) {
            for (std::uint32_t x = 0; x < la.width; ++x) {
                double na = 0.0;
                double nb = 0.0;
                for (std::uint32_t c = 0; c < la.channels; ++c) {
                    na += static_cast<double>(la.at(c, y, x)) * la.at(c, y, x);
                    nb += static_cast<double>(lb.at(c, y, x)) * lb.at(c, y, x);
                }
                const double ia = na > 0.0 ? 1.0 / std::sqrt(na) : 0.0;
                const double ib = nb > 0.0 ? 1.0 / std::sqrt(nb) : 0.0;
                for (std::uint32_t c = 0; c < la.channels; ++c) {
                    const double diff = la.at(c, y, x) * ia - lb.at(c, y, x) * ib;
                    layer_sum += la.weights[c] * diff * diff;
                }
            }
        }
        total += layer_sum / (static_cast<double>(la.height) * la.width);
    }
    return total;
}

double lpips_paired(std::span<const ActivationStack> generated,
                    std::span<const ActivationStack> reference) {
    if (generated.size() != reference.size() || generated.empty()) {
        throw MetricsError(MetricsErrc::ShapeMismatch,
                           "paired LPIPS needs equal, non-empty sets (" +
                               std::to_string(generated.size()) + " vs " +
                               std::to_string(reference.size()) + ")");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < generated.size(); ++i) sum += lpips_distance(generated[i], reference[i]);
    return sum / static_cast<double>(generated.size());
}

double lpips_diversity(std::span<const ActivationStack> generated) {
    if (generated.size() < 2) {
        throw MetricsError(MetricsErrc::TooFewRows, "diversity needs at least 2 stacks");
    }
    double sum = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < generated.size(); ++i) {
        for (std::size_t j = i + 1; j < generated.size(); ++j) {
            sum += lpips_distance(generated[i], generated[j]);
            ++pairs;
        }
    }
    return sum / static_cast<double>(pairs);
}

std::vector<std::uint8_t> encode_act1(const ActivationStack& stack) {
    validate(stack);
    ByteWriter w;
    w.put_string("ACT1");
    w.put(static_cast<std::uint32_t>(stack.layers.size()));
    for (const auto& layer : stack.layers) {
        w.put(layer.channels);
        w.put(layer.height);
        w.put(layer.width);
        for (const float v : layer.weights) w.put(v);
        for (const float v : layer.values) w.put(v);
    }
    return std::move(w).take();
}

std::vector<ActivationStack> decode_act1(std::span<const std::uint8_t> bytes) {
    std::vector<ActivationStack> stacks;
    try {
        ByteReader r(bytes);
        while (!r.at_end()) {
            if (r.get_string(4) != "ACT1") {
                throw MetricsError(MetricsErrc::BadFormat, "missing ACT1 magic at record " +
                                                               std::to_string(stacks.size()));
            }
            ActivationStack stack;
            const auto layers = r.get<std::uint32_t>();
            for (std::uint32_t l = 0; l < layers; ++l) {
                ActivationLayer layer;
                layer.channels = r.get<std::uint32_t>();
                layer.height = r.get<std::uint32_t>();
                layer.width = r.get<std::uint32_t>();
                const std::size_t count = std::size_t{layer.channels} * layer.height * layer.width;
                if ((count + layer.channels) * sizeof(float) > r.remaining()) {
                    throw MetricsError(MetricsErrc::BadFormat, "truncated ACT1 layer");
                }
                layer.weights.resize(layer.channels);
                for (auto& v : layer.weights) v = r.get<float>();
                layer.values.resize(count);
                for (auto& v : layer.values) v = r.get<float>();
                stack.layers.push_back(std::move(layer));
            }
            validate(stack);
            stacks.push_back(std::move(stack));
        }
    } catch (const ShortRead& e) {
        throw MetricsError(MetricsErrc::BadFormat, e.what());
    }
    return stacks;
}

std::vector<ActivationStack> read_act1(const std::string& path) {
    return decode_act1(read_file_bytes(path));
}

void write_act1(const std::string& path, std::span<const ActivationStack> stacks) {
    std::vector<std::uint8_t> bytes;
    for (const auto& s : stacks) {
        const auto record = encode_act1(s);
        bytes.insert(bytes.end(), record.begin(), record.end());
    }
    write_file_bytes(path, bytes);
}

}  // namespace nodulegen::metrics
