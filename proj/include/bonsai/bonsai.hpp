// Copyright 2026 The Bonsai BO Authors. All Rights Reserved.
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
// =============================================================================

#ifndef BONSAI_BONSAI_HPP
#define BONSAI_BONSAI_HPP

#include "bonsai/space.hpp"
#include "bonsai/sobol.hpp"
#include "bonsai/kernel.hpp"
#include "bonsai/gp.hpp"
#include "bonsai/acquisition.hpp"
#include "bonsai/optimizer.hpp"
#include "bonsai/pruning.hpp"
#include "bonsai/bench.hpp"
#include "bonsai/io.hpp"

#endif  // BONSAI_BONSAI_HPP
