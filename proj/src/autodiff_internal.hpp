// Copyright 2026 The bandext Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <functional>
#include <initializer_list>
#include <memory>
#include <vector>

#include "bandext/autodiff.hpp"

namespace bandext::ad::detail {

// Wraps a freshly computed value in a node. Parents and the backward
// closure are kept only when recording is on and some input needs a grad.
// Undefined inputs are stored as null parents to keep positions stable.
Tensor make_result(Shape shape, std::vector<double> value, std::initializer_list<const Tensor*> inputs,
                   std::function<void(Node&)> backward_fn);

bool wants_grad(const std::shared_ptr<Node>& n);

}  // namespace bandext::ad::detail
