// Copyright 2026 The arma-planar Authors
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

#include "arma/env/terrain.hpp"

#include <algorithm>
#include <cmath>

namespace arma::env {

namespace {

constexpr int kSamples = static_cast<int>(2.0 * Terrain::kExtent / Terrain::kSpacing) + 1;
// Base lattice of the midpoint displacement, in samples (1.6 m).
constexpr int kCell = 32;

void rescale(std::vector<double>& p, double amplitude) {
  const auto [lo, hi] = std::minmax_element(p.begin(), p.end());
  const double min = *lo;
  const double span = *hi - *lo;
  for (double& v : p) v = span > 0.0 ? (v - min) / span * amplitude : 0.0;
}

}  // namespace

const char* terrain_kind_name(TerrainKind kind) {
  switch (kind) {
    case TerrainKind::kFlat:
      return "flat";
    case TerrainKind::kSlope:
      return "slope";
    case TerrainKind::kFractal:
      return "fractal";
    case TerrainKind::kSteps:
      return "steps";
  }
  return "?";
}

Terrain Terrain::flat() { return Terrain(); }

Terrain Terrain::slope(double grade) {
  Terrain t;
  t.kind_ = TerrainKind::kSlope;
  t.grade_ = grade;
  t.amplitude_ = std::abs(grade);
  return t;
}

Terrain Terrain::fractal(double amplitude, std::mt19937_64& rng, double roughness) {
  Terrain t;
  t.kind_ = TerrainKind::kFractal;
  t.amplitude_ = amplitude;
  t.profile_.assign(kSamples, 0.0);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < kSamples; i += kCell) t.profile_[static_cast<size_t>(i)] = u(rng);
  // Recursive midpoint displacement within every lattice cell.
  double scale = roughness;
  for (int step = kCell; step > 1; step /= 2) {
    const int half = step / 2;
    for (int i = 0; i + step < kSamples; i += step) {
      const double mid = 0.5 * (t.profile_[static_cast<size_t>(i)] + t.profile_[static_cast<size_t>(i + step)]);
      t.profile_[static_cast<size_t>(i + half)] = mid + scale * u(rng);
    }
    scale *= roughness;
  }
  rescale(t.profile_, amplitude);
  return t;
}

Terrain Terrain::steps(double amplitude, std::mt19937_64& rng, double tread) {
  Terrain t;
  t.kind_ = TerrainKind::kSteps;
  t.amplitude_ = amplitude;
  t.profile_.assign(kSamples, 0.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int per_step = std::max(1, static_cast<int>(std::lround(tread / kSpacing)));
  double level = 0.5 * amplitude;
  for (int i = 0; i < kSamples; ++i) {
    if (i % per_step == 0) level = amplitude * u(rng);
    t.profile_[static_cast<size_t>(i)] = level;
  }
  return t;
}

Terrain Terrain::generate(TerrainKind kind, double amplitude, std::mt19937_64& rng) {
  switch (kind) {
    case TerrainKind::kFlat:
      return flat();
    case TerrainKind::kSlope: {
      const double sign = std::uniform_real_distribution<double>(0.0, 1.0)(rng) < 0.5 ? -1.0 : 1.0;
      return slope(sign * amplitude);
    }
    case TerrainKind::kFractal:
      return fractal(amplitude, rng);
    case TerrainKind::kSteps:
      return steps(amplitude, rng);
  }
  return flat();
}

double Terrain::height(double x, bool* clamped) const {
  const bool out = x < -kExtent || x > kExtent;
  if (clamped != nullptr) *clamped = out;
  const double xc = std::clamp(x, -kExtent, kExtent);
  switch (kind_) {
    case TerrainKind::kFlat:
      return 0.0;
    case TerrainKind::kSlope:
      return grade_ * xc;
    default:
      break;
  }
  const double s = (xc + kExtent) / kSpacing;
  const int i = std::min(static_cast<int>(s), kSamples - 2);
  const double f = s - i;
  return (1.0 - f) * profile_[static_cast<size_t>(i)] + f * profile_[static_cast<size_t>(i + 1)];
}

double Terrain::slope_at(double x) const {
  switch (kind_) {
    case TerrainKind::kFlat:
      return 0.0;
    case TerrainKind::kSlope:
      return grade_;
    default:
      break;
  }
  if (x < -kExtent || x > kExtent) return 0.0;
  const double s = (x + kExtent) / kSpacing;
  const int i = std::min(static_cast<int>(s), kSamples - 2);
  return (profile_[static_cast<size_t>(i + 1)] - profile_[static_cast<size_t>(i)]) / kSpacing;
}

}  // namespace arma::env
