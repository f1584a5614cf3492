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

#ifndef ARMA_ENV_TERRAIN_HPP_
#define ARMA_ENV_TERRAIN_HPP_

#include <cstdint>
#include <random>
#include <vector>

namespace arma::env {

enum class TerrainKind { kFlat, kSlope, kFractal, kSteps };

const char* terrain_kind_name(TerrainKind kind);

// Height profile z(x) sampled on a uniform grid and linearly interpolated.
class Terrain {
 public:
  static constexpr double kSpacing = 0.05;
  static constexpr double kExtent = 120.0;  // profile covers [-kExtent, kExtent]

  Terrain() = default;

  static Terrain flat();
  // Constant grade dz/dx (0.1 is a 10% slope).
  static Terrain slope(double grade);
  // Midpoint-displacement profile rescaled so peak-to-peak equals amplitude.
  static Terrain fractal(double amplitude, std::mt19937_64& rng, double roughness = 0.6);
  // Piecewise-constant steps with heights in [0, amplitude].
  static Terrain steps(double amplitude, std::mt19937_64& rng, double tread = 0.8);
  static Terrain generate(TerrainKind kind, double amplitude, std::mt19937_64& rng);

  TerrainKind kind() const { return kind_; }
  double amplitude() const { return amplitude_; }
  const std::vector<double>& profile() const { return profile_; }

  // Outside the profile the height is clamped to the boundary sample and
  // `clamped` (when given) is set.
  double height(double x, bool* clamped = nullptr) const;
  double slope_at(double x) const;

 private:
  TerrainKind kind_ = TerrainKind::kFlat;
  double amplitude_ = 0.0;
  double grade_ = 0.0;
  std::vector<double> profile_;
};

}  // namespace arma::env

#endif  // ARMA_ENV_TERRAIN_HPP_
