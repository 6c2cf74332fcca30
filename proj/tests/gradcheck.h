//
// Copyright 2026 The SketchSQL Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Central-difference gradient oracle. It evaluates only forward values, so
// the backward code under test plays no part in the reference.

#ifndef SKETCHSQL_TESTS_GRADCHECK_H_
#define SKETCHSQL_TESTS_GRADCHECK_H_

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "sketchsql/autodiff.h"

namespace sketchsql::testing {

struct GradientReport {
  double worst = 0.0;
  std::string worst_block;
  std::map<std::string, double> per_block;
  std::size_t entries = 0;
};

// Relative error of one entry: |a - n| / max(|a|, |n|, floor). The floor keeps
// entries whose true gradient is zero from dividing by rounding noise.
inline constexpr double kGradientFloor = 1e-6;

/// `loss` records a scalar on a fresh tape from the current parameter values.
/// Every entry of every parameter is perturbed by +-step.
GradientReport MaxRelativeGradientError(
    std::vector<ad::Parameter>& params, const std::function<ad::Var(ad::Tape&)>& loss,
    double step = 1e-5);

}  // namespace sketchsql::testing

#endif  // SKETCHSQL_TESTS_GRADCHECK_H_
