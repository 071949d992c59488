// Copyright 2026 The STAR Authors
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

#include <cstddef>
#include <span>
#include <vector>

namespace star {

// Fixed-dimension, finite, unit-L2-norm vector. Construction through
// `normalized` or `from_unit` enforces the invariants.
class EmbeddingVector {
 public:
  EmbeddingVector() = default;

  // Scales `values` to unit norm. Vectors already unit within 1e-12 are kept
  // bit-for-bit. Throws DegenerateFusionError on a (near) zero vector and
  // InvalidArgumentError on non-finite components.
  static EmbeddingVector normalized(std::vector<double> values);

  // Adopts values that must already be unit norm (within 1e-6).
  static EmbeddingVector from_unit(std::vector<double> values);

  std::size_t dim() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  bool empty() const { return values_.empty(); }

  bool operator==(const EmbeddingVector&) const = default;

 private:
  explicit EmbeddingVector(std::vector<double> values) : values_(std::move(values)) {}
  std::vector<double> values_;
};

double dot(std::span<const double> a, std::span<const double> b);
double l2_norm(std::span<const double> a);
double squared_distance(std::span<const double> a, std::span<const double> b);

// Throws DimensionMismatchError when the sizes differ.
void require_same_dim(std::size_t a, std::size_t b, const char* what);

inline constexpr double kUnitNormTolerance = 1e-6;

}  // namespace star
