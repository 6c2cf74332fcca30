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

#include "gradcheck.h"

#include <algorithm>
#include <cmath>

namespace sketchsql::testing {

GradientReport MaxRelativeGradientError(std::vector<ad::Parameter>& params,
                                        const std::function<ad::Var(ad::Tape&)>& loss,
                                        double step) {
  for (auto& p : params) p.ZeroGrad();
  {
    ad::Tape tape;
    tape.Backward(loss(tape));
  }
  auto value = [&] {
    ad::Tape tape;
    return tape.value(loss(tape))(0, 0);
  };
  GradientReport report;
  for (auto& p : params) {
    double block = 0.0;
    for (Eigen::Index i = 0; i < p.value.size(); ++i) {
      double& x = p.value.data()[i];
      const double saved = x;
      x = saved + step;
      const double up = value();
      x = saved - step;
      const double down = value();
      x = saved;
      const double numeric = (up - down) / (2.0 * step);
      const double analytic = p.grad.data()[i];
      const double denom =
          std::max({std::abs(analytic), std::abs(numeric), kGradientFloor});
      block = std::max(block, std::abs(analytic - numeric) / denom);
      ++report.entries;
    }
    report.per_block[p.name] = block;
    if (block >= report.worst) {
      report.worst = block;
      report.worst_block = p.name;
    }
  }
  return report;
}

}  // namespace sketchsql::testing
