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


#include "nodulegen/study/mann_whitney.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "nodulegen/study/error.hpp"

namespace nodulegen::study {

namespace {

struct Ranked {
    std::vector<double> ranks;  ///< midranks of the pooled sample, xs first
    double tie_term = 0.0;      ///< sum of t^3 - t over tie groups
    bool ties = false;
};

Ranked pooled_ranks(std::span<const double> xs, std::span<const double> ys) {
    const std::size_t n = xs.size() + ys.size();
    std::vector<std::pair<double, std::size_t>> v;
    v.reserve(n);
    for (std::size_t i = 0; i < xs.size(); ++i) v.emplace_back(xs[i], i);
    for (std::size_t i = 0; i < ys.size(); ++i) v.emplace_back(ys[i], xs.size() + i);
    std::sort(v.begin(), v.end());
    Ranked r{std::vector<double>(n), 0.0, false};
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && v[j].first == v[i].first) ++j;
        const double mid = (static_cast<double>(i + j) + 1.0) / 2.0;
        for (std::size_t k = i; k < j; ++k) r.ranks[v[k].second] = mid;
        const auto t = static_cast<double>(j - i);
        if (j - i > 1) {
            r.ties = true;
            r.tie_term += t * t * t - t;
        }
        i = j;
    }
    return r;
}

void require_samples(std::span<const double> xs, std::span<const double> ys) {
    if (xs.empty() || ys.empty()) {
        throw StudyError(StudyErrc::EmptySample, "Mann-Whitney needs two non-empty samples");
    }
}

// Counts subsets of ranks[from..] of size `left` whose rank sum lands at least
// as far from the null mean as the observed sum.
void enumerate(const std::vector<double>& ranks, std::size_t from, std::size_t left, double sum,
               double center, double observed, std::size_t& extreme, std::size_t& total) {
    if (left == 0) {
        ++total;
        if (std::abs(sum - center) >= observed - 1e-9) ++extreme;
        return;
    }
    for (std::size_t i = from; i + left <= ranks.size(); ++i) {
        enumerate(ranks, i + 1, left - 1, sum + ranks[i], center, observed, extreme, total);
    }
}

}  // namespace

double u_statistic(std::span<const double> xs, std::span<const double> ys) {
    double u = 0.0;
    for (const double x : xs) {
        for (const double y : ys) {
            if (x > y) u += 1.0;
            else if (x == y) u += 0.5;
        }
    }
    return u;
}

double exact_p(std::span<const double> xs, std::span<const double> ys) {
    require_samples(xs, ys);
    const auto r = pooled_ranks(xs, ys);
    const auto n = static_cast<double>(xs.size());
    const auto big_n = static_cast<double>(r.ranks.size());
    double observed_sum = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) observed_sum += r.ranks[i];
    const double center = n * (big_n + 1.0) / 2.0;
    std::size_t extreme = 0, total = 0;
    enumerate(r.ranks, 0, xs.size(), 0.0, center, std::abs(observed_sum - center), extreme, total);
    return static_cast<double>(extreme) / static_cast<double>(total);
}

double normal_p(std::span<const double> xs, std::span<const double> ys) {
    require_samples(xs, ys);
    const auto r = pooled_ranks(xs, ys);
    const auto n = static_cast<double>(xs.size());
    const auto m = static_cast<double>(ys.size());
    const double big_n = n + m;
    const double var = n * m / 12.0 * ((big_n + 1.0) - r.tie_term / (big_n * (big_n - 1.0)));
    if (!(var > 0.0)) return 1.0;
    const double z = std::max(0.0, std::abs(u_statistic(xs, ys) - n * m / 2.0) - 0.5) / std::sqrt(var);
    return std::min(1.0, std::erfc(z / std::numbers::sqrt2));
}

MannWhitney mann_whitney_u(std::span<const double> xs, std::span<const double> ys) {
    require_samples(xs, ys);
    MannWhitney out;
    out.u_xy = u_statistic(xs, ys);
    const double nm = static_cast<double>(xs.size() * ys.size());
    out.u = std::min(out.u_xy, nm - out.u_xy);
    out.exact = xs.size() + ys.size() <= kExactLimit && !pooled_ranks(xs, ys).ties;
    out.p = out.exact ? exact_p(xs, ys) : normal_p(xs, ys);
    return out;
}

}  // namespace nodulegen::study
