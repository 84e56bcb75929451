/* Copyright 2026 The rinkreg Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "rinkreg/homography.hpp"

namespace rinkreg {

const std::array<double, 8>& DefaultNormalizationScales() {
  // Per-entry standard deviation over 10,000 augmented draws from the frozen
  // camera pool (rinkreg calibrate-scales).
  static const std::array<double, 8> kScales = {3.076, 1.171, 854.9, 0.2792, 0.3904, 88.30, 1.794e-3, 1.375e-3};
  return kScales;
}

}  // namespace rinkreg
