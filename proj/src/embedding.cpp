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

#include "star/embedding.hpp"

#include <cmath>
#include <string>

#include "star/error.hpp"

namespace star {

namespace {

void require_finite(std::span<const double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) throw InvalidArgumentError("embedding has a non-finite component");
  }
}

}  // namespace

EmbeddingVector EmbeddingVector::normalized(std::vector<double> values) {
  if (values.empty()) throw InvalidArgumentError("embedding has dimension 0");
  require_finite(values);
  const double norm = l2_norm(values);
  if (norm < 1e-12) throw DegenerateFusionError("cannot normalize a zero vector");
  if (std::abs(norm - 1.0) > 1e-12) {
    for (double& v : values) v /= norm;
  }
  return EmbeddingVector(std::move(values));
}

EmbeddingVector EmbeddingVector::from_unit(std::vector<double> values) {
  if (values.empty()) throw InvalidArgumentError("embedding has dimension 0");
  require_finite(values);
  const double norm = l2_norm(values);
  if (std::abs(norm - 1.0) > kUnitNormTolerance) {
    throw InvalidArgumentError("embedding is not unit norm (norm " + std::to_string(norm) + ")");
  }
  return EmbeddingVector(std::move(values));
}

double dot(std::span<const double> a, std::span<const double> b) {
  require_same_dim(a.size(), b.size(), "dot product");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

double l2_norm(std::span<const double> a) {
  double sum = 0.0;
  for (double v : a) sum += v * v;
  return std::sqrt(sum);
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  require_same_dim(a.size(), b.size(), "distance");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

void require_same_dim(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw DimensionMismatchError(std::string(what) + ": dimension " + std::to_string(a) +
                                 " vs " + std::to_string(b));
  }
}

}  // namespace star
