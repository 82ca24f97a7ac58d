// Copyright 2026 The WKM Planner Authors. All Rights Reserved.
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

#include <string>
#include <vector>

namespace wkm {

// Probability vector over an ordered action enumeration.
struct ActionDistribution {
  std::vector<std::string> action_ids;
  std::vector<double> probs;

  // Throws PreconditionError unless lengths agree, every prob is >= 0 and
  // they sum to 1 within 1e-9.
  void validate() const;
};

}  // namespace wkm
