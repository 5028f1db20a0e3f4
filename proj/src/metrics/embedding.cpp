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

#include "nodulegen/metrics/embedding.hpp"

#include <cmath>

#include "nodulegen/common/binary_io.hpp"

namespace nodulegen::metrics {

const char* code_name(MetricsErrc code) noexcept {
    switch (code) {
        case MetricsErrc::TooFewRows: return "TooFewRows";
        case MetricsErrc::DimensionMismatch: return "DimensionMismatch";
        case MetricsErrc::NonConvergedEigen: return "NonConvergedEigen";
        case MetricsErrc::SubsetTooLarge: return "SubsetTooLarge";
        case MetricsErrc::ShapeMismatch: return "ShapeMismatch";
        case MetricsErrc::ZeroVector: return "ZeroVector";
        case MetricsErrc::IncompleteGrid: return "IncompleteGrid";
        case MetricsErrc::NonFinite: return "NonFinite";
        case MetricsErrc::BadFormat: return "BadFormat";
        case MetricsErrc::InvalidArgument: return "InvalidArgument";
    }
    return "MetricsError";
}

void require_finite(std::span<const float> values, const std::string& what) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) {
            throw MetricsError(MetricsErrc::NonFinite, what + " value " + std::to_string(i));
        }
    }
}

EmbeddingMatrix::EmbeddingMatrix(std::size_t n, std::size_t d, std::vector<float> values,
                                 std::string provider_tag, std::vector<std::string> ids)
    : rows(n), dim(d), data(std::move(values)), provider(std::move(provider_tag)),
      row_ids(std::move(ids)) {
    if (data.size() != rows * dim) {
        throw MetricsError(MetricsErrc::ShapeMismatch,
                           std::to_string(data.size()) + " values for " + std::to_string(rows) +
                               "x" + std::to_string(dim));
    }
    if (row_ids.empty()) {
        row_ids.reserve(rows);
        for (std::size_t i = 0; i < rows; ++i) row_ids.push_back(std::to_string(i));
    }
    if (row_ids.size() != rows) {
        throw MetricsError(MetricsErrc::ShapeMismatch, "row id count differs from row count");
    }
    require_finite(data, "embedding");
}

std::vector<std::uint8_t> encode_emb1(const EmbeddingMatrix& m) {
    if (m.provider.size() > 255) {
        throw MetricsError(MetricsErrc::BadFormat, "provider tag longer than 255 bytes");
    }
    if (m.row_ids.size() != m.rows || m.data.size() != m.rows * m.dim) {
        throw MetricsError(MetricsErrc::ShapeMismatch, "inconsistent embedding matrix");
    }
    ByteWriter w;
    w.put_string("EMB1");
    w.put(static_cast<std::uint32_t>(m.rows));
    w.put(static_cast<std::uint32_t>(m.dim));
    w.put(static_cast<std::uint8_t>(m.provider.size()));
    w.put_string(m.provider);
    for (const float v : m.data) w.put(v);
    for (const auto& id : m.row_ids) {
        if (id.find('\n') != std::string::npos) {
            throw MetricsError(MetricsErrc::BadFormat, "row id contains a newline");
        }
        w.put_string(id);
        w.put('\n');
    }
    return std::move(w).take();
}

EmbeddingMatrix decode_emb1(std::span<const std::uint8_t> bytes) {
    try {
        ByteReader r(bytes);
        if (r.get_string(4) != "EMB1") {
            throw MetricsError(MetricsErrc::BadFormat, "missing EMB1 magic");
        }
        const auto n = r.get<std::uint32_t>();
        const auto d = r.get<std::uint32_t>();
        const auto tag_length = r.get<std::uint8_t>();
        auto provider = r.get_string(tag_length);
        const std::size_t count = std::size_t{n} * d;
        if (count * sizeof(float) > r.remaining()) {
            throw MetricsError(MetricsErrc::BadFormat, "truncated float block");
        }
        std::vector<float> data(count);
        for (auto& v : data) v = r.get<float>();

        const auto tail = r.get_bytes(r.remaining());
        std::vector<std::string> ids;
        std::string current;
        for (const auto byte : tail) {
            if (byte == '\n') {
                ids.push_back(std::move(current));
                current.clear();
            } else {
                current.push_back(static_cast<char>(byte));
            }
        }
        if (!current.empty() || ids.size() != n) {
            throw MetricsError(MetricsErrc::BadFormat,
                               "expected " + std::to_string(n) + " newline-terminated row ids");
        }
        return EmbeddingMatrix(n, d, std::move(data), std::move(provider), std::move(ids));
    } catch (const ShortRead& e) {
        throw MetricsError(MetricsErrc::BadFormat, e.what());
    }
}

EmbeddingMatrix read_emb1(const std::string& path) { return decode_emb1(read_file_bytes(path)); }

void write_emb1(const std::string& path, const EmbeddingMatrix& matrix) {
    write_file_bytes(path, encode_emb1(matrix));
}

}  // namespace nodulegen::metrics
